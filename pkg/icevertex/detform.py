""" Determinant formulas for the partition function and numeric checks of their properties. """

# MIT License

# Copyright (c) 2022-2023 Luis Gálvez

# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.

# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

import logging
import warnings

from dataclasses import dataclass
from math import comb

import mpmath
import numpy as np

from scipy.linalg import LinAlgWarning, lu_factor

from icevertex.errors import DomainError, NonFiniteValue, SingularMatrixWarning
from icevertex.lattice import LatticeSize
from icevertex.utils import relative_difference, richardson
from icevertex.weights import nonvanishing

logger = logging.getLogger(__name__)

# Condition estimates above this value trigger a SingularMatrixWarning
CONDITION_LIMIT = 1e12

FORMULAS = ('cosh', 'ck')


@dataclass(frozen=True)
class DetReport:
    """
    Result of a determinant evaluation of the partition function.

    Attributes
    ----------
    value : complex
        The partition function.
    condition_estimate : float
        Condition number of the determinant's matrix, at least 1.
    formula : string
        'cosh' for the determinant with h rows, 'ck' for the one with C_k rows.
    """
    value: complex
    condition_estimate: float
    formula: str

    def to_dict(self):
        return {'value': [self.value.real, self.value.imag], 'cond': self.condition_estimate,
                'formula': self.formula}


class _DoubleArithmetic:
    """ Complex double precision through numpy and scipy. """

    @staticmethod
    def number(value):
        return complex(value)

    @staticmethod
    def exp(x):
        return np.exp(x)

    @staticmethod
    def f(x):
        return 2. * np.sinh(x)

    @staticmethod
    def h(x):
        return 2. * np.cosh(x)

    @staticmethod
    def det(rows):
        matrix = np.array(rows, dtype=complex)
        if not np.all(np.isfinite(matrix)):
            raise NonFiniteValue('determinant matrix has non-finite entries')

        with warnings.catch_warnings():
            warnings.simplefilter('ignore', LinAlgWarning)
            lu, piv = lu_factor(matrix)

        swaps = np.count_nonzero(piv != np.arange(len(piv)))
        return (-1)**swaps * np.prod(np.diag(lu))

    @staticmethod
    def condition(rows):
        with np.errstate(divide='ignore', invalid='ignore'):
            return float(np.linalg.cond(np.array(rows, dtype=complex)))


class _MultiprecisionArithmetic:
    """ Complex arithmetic at the working precision of mpmath. """

    @staticmethod
    def number(value):
        return mpmath.mpc(value)

    @staticmethod
    def exp(x):
        return mpmath.exp(x)

    @staticmethod
    def f(x):
        return 2 * mpmath.sinh(x)

    @staticmethod
    def h(x):
        return 2 * mpmath.cosh(x)

    @staticmethod
    def det(rows):
        return mpmath.det(mpmath.matrix(rows))

    @staticmethod
    def condition(rows):
        matrix = mpmath.matrix(rows)
        try:
            return float(mpmath.mnorm(matrix, 1) * mpmath.mnorm(mpmath.inverse(matrix), 1))
        except ZeroDivisionError:
            return float('inf')


def _arithmetic(dps):
    return _DoubleArithmetic if dps is None else _MultiprecisionArithmetic


def _values(params, arith):
    return (arith.number(params.gamma), arith.number(params.zeta), arith.number(params.phi),
            tuple(arith.number(lam) for lam in params.lambdas), tuple(arith.number(mu) for mu in params.mus))


def _ck(k, lam, gamma, arith):
    v = 2 * lam + gamma
    total = arith.number(0)

    for k1 in range(k + 1):
        for k2 in range(k + 1 - k1):
            for k3 in range(k + 1 - k1 - k2):
                k4 = k - k1 - k2 - k3
                total += arith.exp((k1 + k2 - k3 - k4) * v + (k1 - k2 + k3 - k4) * gamma)

    return total


def ck_coefficient(k, lam, gamma):
    """
    Sum of exp((k1+k2-k3-k4) v + (k1-k2+k3-k4) gamma) over k1+k2+k3+k4 = k, with v = 2 lam + gamma.

    Parameters
    ----------
    k : int
        Non-negative order.
    lam : complex
        Spectral parameter.
    gamma : complex
        Crossing parameter.

    Returns
    -------
    value : complex
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise DomainError(f'k must be a non-negative integer, got {k!r}')

    return complex(_ck(k, complex(lam), complex(gamma), _DoubleArithmetic))


def _products(values, arith):
    gamma, zeta, _, lambdas, mus = values
    f = arith.f
    value = arith.number(1)

    for mu in mus:
        value *= arith.exp(mu + zeta) * f(mu - zeta)
    for lam in lambdas:
        value *= f(2 * lam)

    for i, mu_i in enumerate(mus, start=1):
        for j, mu_j in enumerate(mus[i:], start=i + 1):
            value /= nonvanishing(f(mu_j + mu_i), f'f(mu_{j}+mu_{i})')
            value /= nonvanishing(f(mu_j - mu_i), f'f(mu_{j}-mu_{i})')

    for i, lam_i in enumerate(lambdas, start=1):
        for j, lam_j in enumerate(lambdas[i:], start=i + 1):
            value /= nonvanishing(f(lam_i - lam_j), f'f(lambda_{i}-lambda_{j})')
            value /= nonvanishing(f(lam_i + lam_j + gamma), f'f(lambda_{i}+lambda_{j}+gamma)')

    return value


def _f_rows(values, arith):
    # The product of f(mu_i +- lambda_j) over all j is folded into row i, which keeps the
    # rows finite at mu_i = +-lambda_j.
    gamma, _, _, lambdas, mus = values
    f = arith.f
    rows = []

    for i, mu in enumerate(mus, start=1):
        row = []
        for j, lam in enumerate(lambdas, start=1):
            entry = 1 / nonvanishing(f(mu + lam + gamma), f'f(mu_{i}+lambda_{j}+gamma)')
            entry /= nonvanishing(f(mu - lam - gamma), f'f(mu_{i}-lambda_{j}-gamma)')
            for other in lambdas[:j - 1] + lambdas[j:]:
                entry *= f(mu + other) * f(mu - other)
            row.append(entry)
        rows.append(row)

    return rows


def _formula_terms(values, formula, arith):
    """ Returns the scalar prefactor and the matrix rows of a determinant formula. """
    gamma, _, phi, lambdas, mus = values
    n, m = len(lambdas), len(mus)
    rows = _f_rows(values, arith)

    if formula == 'cosh':
        rows += [[arith.h((n - i) * (2 * lam + gamma)) for lam in lambdas] for i in range(m + 1, n)]
        if m < n:
            rows.append([arith.number(1)] * n)
        constant = arith.exp((comb(m, 2) - n * m) * gamma) * arith.f(gamma)**m
    elif formula == 'ck':
        rows += [[_ck(k, lam, gamma, arith) for lam in lambdas] for k in range(n - m - 1, -1, -1)]
        constant = arith.exp(-comb(n + 1, 2) * gamma) * arith.f(gamma)**n
        for k in range(1, n - m + 1):
            constant /= nonvanishing(1 - arith.exp(-2 * k * gamma), f'1-exp(-{2 * k}*gamma)')
    else:
        raise DomainError(f'unknown formula {formula!r}, expected one of {FORMULAS}')

    return phi**(n - m) * constant * _products(values, arith), rows


def _partition_value(values, formula, arith):
    prefactor, rows = _formula_terms(values, formula, arith)
    return prefactor * arith.det(rows)


def _report(params, formula, dps):
    arith = _arithmetic(dps)

    with mpmath.workdps(dps or mpmath.mp.dps):
        prefactor, rows = _formula_terms(_values(params, arith), formula, arith)
        value = complex(prefactor * arith.det(rows))
        condition = max(1., arith.condition(rows))

    if not np.isfinite(value):
        raise NonFiniteValue(f'{formula} determinant evaluated to {value}')

    if condition > CONDITION_LIMIT:
        logger.warning('condition estimate %.3g of the %s determinant for %s', condition, formula, params.size)
        warnings.warn(f'condition estimate {condition:.3g} of the {formula} determinant', SingularMatrixWarning)

    return DetReport(value, condition, formula)


def det_partition(params, dps=None):
    """
    Evaluates the partition function with the determinant whose lower rows are
    h((n-i)(2 lambda_j + gamma)) for m < i < n, closed by a row of ones when m < n.

    Parameters
    ----------
    params : :obj:`ModelParams`
        Generic model parameters.
    dps : int, optional
        Decimal digits for an mpmath evaluation. Complex double precision with a
        pivoted LU factorization if omitted.

    Returns
    -------
    report : :obj:`DetReport`
        Value, condition estimate and formula tag 'cosh'.

    Raises
    ------
    PoleError
        If one of the denominators vanishes.
    """
    return _report(params, 'cosh', dps)


def det_partition_appendix(params, dps=None):
    """
    Evaluates the partition function with the determinant whose lower rows are
    C_{n-m-1}(lambda_j), ..., C_0(lambda_j). See :func:`det_partition`.

    Raises
    ------
    PoleError
        Also if 1 - exp(-2k gamma) vanishes for some k <= n - m.
    """
    return _report(params, 'ck', dps)


@dataclass(frozen=True)
class Swap:
    """ Exchange of two spectral parameters, ``kind`` being 'lambda' or 'mu', with 1-based indices. """
    kind: str
    i: int
    j: int

    def apply(self, params):
        values = list(_indexed(params, self.kind))
        for index in (self.i, self.j):
            _check_index(values, index, self.kind)
        values[self.i - 1], values[self.j - 1] = values[self.j - 1], values[self.i - 1]
        return params.replace(**{self.kind + 's': tuple(values)})


def _indexed(params, kind):
    if kind == 'lambda':
        return params.lambdas
    if kind == 'mu':
        return params.mus
    raise DomainError(f"kind must be 'lambda' or 'mu', got {kind!r}")


def _check_index(values, index, kind):
    if not 1 <= index <= len(values):
        raise DomainError(f'{kind} index {index} outside 1..{len(values)}')


def check_symmetry(params, swap):
    """ Relative change of the partition function under a :obj:`Swap` of two parameters. """
    return relative_difference(det_partition(params).value, det_partition(swap.apply(params)).value)


def check_periodicity(params, kind, index):
    """ Relative change of the partition function under a 2 pi i shift of one lambda or mu. """
    values = list(_indexed(params, kind))
    _check_index(values, index, kind)
    values[index - 1] += 2j * np.pi
    shifted = params.replace(**{kind + 's': tuple(values)})

    return relative_difference(det_partition(params).value, det_partition(shifted).value)


def _polynomial_sample(params, j, mu):
    n = params.size.n
    mus = params.mus[:j - 1] + (mu,) + params.mus[j:]
    value = det_partition(params.replace(mus=mus)).value * np.exp((2 * n - 2) * mu)

    for lam in params.lambdas:
        value *= 2. * np.sinh(lam + mu + params.gamma) * 2. * np.sinh(lam - mu + params.gamma)

    return value


def check_polynomiality(params, j, degree=None, radius=0.25):
    """
    Tests that e^{(2n-2) mu_j} prod_i f(lambda_i +- mu_j + gamma) Z is a polynomial in
    t = e^{2 mu_j} of the given degree.

    The function is sampled at 2n+1 points on a circle of ``radius`` around mu_j,
    interpolated through the first degree+1 of them and compared at the last one.

    Parameters
    ----------
    params : :obj:`ModelParams`
        Generic model parameters with m >= 1.
    j : int
        1-based index of the mu to vary.
    degree : int, optional
        Interpolation degree, 2n-1 by default.
    radius : float
        Radius of the sampling circle in the mu plane.

    Returns
    -------
    mismatch : float
        Relative difference between the sample and the interpolant at the last point.
    """
    n = params.size.n
    _check_index(params.mus, j, 'mu')
    degree = 2 * n - 1 if degree is None else degree
    if not 0 <= degree < 2 * n:
        raise DomainError(f'degree must lie in 0..{2 * n - 1}, got {degree}')

    center = params.mus[j - 1]
    angles = 2. * np.pi * (np.arange(2 * n + 1) + 0.5) / (2 * n + 1)
    mus = center + radius * np.exp(1j * angles)
    samples = np.array([_polynomial_sample(params, j, complex(mu)) for mu in mus])

    t0 = np.exp(2. * center)
    scaled = (np.exp(2. * mus) - t0) / abs(t0)
    coefficients = np.linalg.solve(np.vander(scaled[:degree + 1], degree + 1), samples[:degree + 1])

    return relative_difference(samples[-1], np.polyval(coefficients, scaled[-1]))


def check_recursion(params, k, l, sign):
    """
    Compares the partition function at mu_k = sign * lambda_l with
    e^{-n gamma} e^{zeta + mu_k} f(zeta - mu_k) prod_i f(lambda_i + lambda_l) / f(lambda_i + lambda_l + gamma)
    times the partition function of the system without lambda_l and mu_k.

    Returns
    -------
    difference : float
        Relative difference of the two sides.
    """
    if sign not in (1, -1):
        raise DomainError(f'sign must be +1 or -1, got {sign!r}')
    _check_index(params.mus, k, 'mu')
    _check_index(params.lambdas, l, 'lambda')

    n, gamma, zeta = params.size.n, params.gamma, params.zeta
    lam = params.lambdas[l - 1]
    mu = sign * lam
    special = params.replace(mus=params.mus[:k - 1] + (mu,) + params.mus[k:])

    rhs = np.exp(-n * gamma) * np.exp(zeta + mu) * 2. * np.sinh(zeta - mu)
    for other in params.lambdas:
        rhs *= np.sinh(other + lam) / nonvanishing(np.sinh(other + lam + gamma), f'f(lambda+lambda_{l}+gamma)')

    if n > 1:
        reduced = special.replace(lambdas=params.lambdas[:l - 1] + params.lambdas[l:],
                                  mus=params.mus[:k - 1] + params.mus[k:])
        rhs *= det_partition(reduced).value

    return relative_difference(det_partition(special).value, rhs)


def _limit_digits(exponent):
    return 30 + int(exponent / np.log(10.))


def check_limit_step(params, R=20., dps=None):
    """
    Sends mu_{m+1} of an (n, m+1) system to R + i Im(mu_{m+1}) and compares with
    (e^gamma - e^-gamma) / (phi e^gamma) (1 + e^{-2 gamma} + ... + e^{-2(n-m-1) gamma}) Z_{n,m}.

    Both sides are evaluated with mpmath at ``dps`` digits, by default enough to
    resolve the cancellation of order e^{-2nR}. The difference decays like e^{-2R}.
    """
    n, m = params.size.n, params.size.m - 1
    if m < 0:
        raise DomainError('the limit step needs at least one mu')

    mus = params.mus[:-1] + (complex(R, params.mus[-1].imag),)
    dps = dps or _limit_digits(2 * n * R)
    arith = _MultiprecisionArithmetic

    with mpmath.workdps(dps):
        large = _partition_value(_values(params.replace(mus=mus), arith), 'cosh', arith)
        reduced = _partition_value(_values(params.replace(mus=mus[:-1]), arith), 'cosh', arith)

        gamma, phi = arith.number(params.gamma), arith.number(params.phi)
        geometric = mpmath.fsum(mpmath.exp(-2 * j * gamma) for j in range(n - m))
        prefactor = (mpmath.exp(gamma) - mpmath.exp(-gamma)) / (phi * mpmath.exp(gamma)) * geometric

        return relative_difference(large, prefactor * reduced)


def check_limit_chain(params, R=20., dps=None):
    """
    Extends an (n, m) system to (n, n) with mu_{m+j} = j R and compares with
    prod_{k=1}^{n-m} (1 - e^{-2k gamma}) / phi^{n-m} Z_{n,m}.
    """
    n, m = params.size.n, params.size.m
    if m == n:
        raise DomainError('the limit chain needs m < n')

    mus = params.mus + tuple(complex(j * R, 0.) for j in range(1, n - m + 1))
    dps = dps or _limit_digits(4 * n * n * R)
    arith = _MultiprecisionArithmetic

    with mpmath.workdps(dps):
        large = _partition_value(_values(params.replace(mus=mus), arith), 'cosh', arith)
        reduced = _partition_value(_values(params, arith), 'cosh', arith)

        gamma, phi = arith.number(params.gamma), arith.number(params.phi)
        prefactor = mpmath.fprod(1 - mpmath.exp(-2 * k * gamma) for k in range(1, n - m + 1)) / phi**(n - m)

        return relative_difference(large, prefactor * reduced)


def homogeneous_limit(n, m, zeta, phi, eps=1e-3, levels=3, dps=60):
    """
    Extrapolates the partition function to lambda_i = gamma, mu_j = 0 at gamma = 4 pi i/3.

    The formula is evaluated at lambda_i = gamma + e i and mu_j = e (j + 1/2) for
    e = eps, eps/2, ... and Richardson-extrapolated to e = 0. The denominators
    vanish at the limit point, so the evaluation runs in mpmath at ``dps`` digits.

    Parameters
    ----------
    n, m : int
        Lattice size.
    zeta, phi : complex
        Boundary parameters.
    eps : float
        Largest perturbation.
    levels : int
        Number of perturbations; the first levels-1 orders in e are removed.
    dps : int
        Decimal digits of the evaluation.

    Returns
    -------
    value : complex
    """
    size = LatticeSize(n, m)
    if eps <= 0 or levels < 1:
        raise DomainError(f'eps must be positive and levels at least 1, got eps={eps}, levels={levels}')

    arith = _MultiprecisionArithmetic

    with mpmath.workdps(dps):
        gamma = mpmath.mpc(0, 4 * mpmath.pi / 3)
        estimates = []
        for level in range(levels):
            e = mpmath.mpf(eps) / 2**level
            values = (gamma, arith.number(zeta), arith.number(phi),
                      tuple(gamma + e * i for i in range(1, size.n + 1)),
                      tuple(e * (j + mpmath.mpf(1) / 2) for j in range(1, size.m + 1)))
            estimates.append(_partition_value(values, 'cosh', arith))
        value = complex(richardson(estimates))

    logger.debug('homogeneous limit of %s from %d levels: %s', size, levels, value)
    return value
