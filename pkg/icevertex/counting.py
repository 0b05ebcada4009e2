""" Exact state counts through Wilson polynomials and the specialized partition function. """

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
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from scipy.integrate import IntegrationWarning, quad
from sympy import Integer, Matrix, Poly, Rational, Symbol, binomial, factorial, rf, sqrt

from icevertex.errors import DomainError, NonIntegerResult, QuadratureFailure
from icevertex.lattice import LatticeSize, TurnKind, all_states, state_turns
from icevertex.weights import ENUMERATION_GAMMA, f

logger = logging.getLogger(__name__)

# Quadrature settings for the orthogonality check
QUADRATURE_CUTOFF = 80.
QUADRATURE_EPSABS = 1e-10
QUADRATURE_TOLERANCE = 1e-6

METHODS = ('wilson', 'hypersum', 'brute')


@dataclass(frozen=True)
class WilsonParams:
    """ Parameters (a, b, c, d) of the Wilson polynomials used for counting. """
    a: Rational
    b: Rational
    c: Rational
    d: Rational

    @property
    def shift(self):
        """ a + b + c + d - 1. """
        return self.a + self.b + self.c + self.d - 1


WILSON_PARAMS = WilsonParams(Rational(1, 3), Rational(1, 2), Rational(2, 3), Integer(1))


def wilson_poly(k, xsq):
    """
    Wilson polynomial W_k(x^2; 1/3, 1/2, 2/3, 1) in exact arithmetic.

    The pair (a + ix)_j (a - ix)_j is evaluated as the real product
    prod_{p<j} ((a + p)^2 + x^2), so rational arguments give rational values.

    Parameters
    ----------
    k : int
        Degree.
    xsq : :obj:`sympy.Rational` or sympy expression
        The argument x^2.

    Returns
    -------
    value : :obj:`sympy.Rational` or sympy expression
    """
    w = WILSON_PARAMS
    ab, ac, ad = w.a + w.b, w.a + w.c, w.a + w.d

    total = Integer(0)
    pair = Integer(1)
    for j in range(k + 1):
        total += rf(-k, j) * rf(k + w.shift, j) * pair / (rf(ab, j) * rf(ac, j) * rf(ad, j) * factorial(j))
        pair *= (w.a + j)**2 + xsq

    return rf(ab, k) * rf(ac, k) * rf(ad, k) * total


def wilson_coefficients(k):
    """ Coefficients of W_k((t/6)^2) as a polynomial in t^2, constant term first. """
    s = Symbol('s')
    coefficients = Poly(wilson_poly(k, s / 36), s).all_coeffs()[::-1]
    return [Rational(c) for c in coefficients]


def wilson_leading(k):
    """ Leading coefficient kappa_k = (-1)^k (3/2 + k)_k / 36^k of W_k((t/6)^2) in t^2. """
    return (-1)**k * rf(WILSON_PARAMS.shift + k, k) / Integer(36)**k


def wilson_norm(k):
    """
    Closed form of <p_k, p_k> for the monic p_k(t^2) = W_k((t/6)^2) / kappa_k:
    2^{2k+1} k! (6k+4)! (2k+1)! / (3^{2k+3/2} (3/2+k)_k (4k+3)!).
    """
    value = (Integer(2)**(2 * k + 1) * factorial(k) * factorial(6 * k + 4) * factorial(2 * k + 1)
             / (Integer(3)**(2 * k + 1) * sqrt(3) * rf(Rational(3, 2) + k, k) * factorial(4 * k + 3)))
    return float(value)


def _orthogonality_weight(t):
    """ t^2 sinh(pi t/6) / sinh(pi t/2), written to stay finite for large t. """
    if t == 0:
        return 0.
    a = np.pi * t / 6.
    return t**2 * np.exp(-2. * a) * np.expm1(-2. * a) / np.expm1(-6. * a)


def _monic(k):
    kappa = wilson_leading(k)
    return np.array([float(c / kappa) for c in wilson_coefficients(k)[::-1]])


def orthogonality_residual(k, l):
    """
    Integrates p_k(t^2) p_l(t^2) t^2 sinh(pi t/6) / sinh(pi t/2) over [0, 80] and
    compares with h_k delta_kl.

    Parameters
    ----------
    k, l : int
        Degrees, between 0 and 6.

    Returns
    -------
    residual : float
        |integral - h_k delta_kl| / max(1, h), with h the norm of the higher degree.

    Raises
    ------
    QuadratureFailure
        If the quadrature error estimate exceeds 1e-6 max(1, h).
    """
    for degree in (k, l):
        if isinstance(degree, bool) or not isinstance(degree, int) or not 0 <= degree <= 6:
            raise DomainError(f'degrees must lie in 0..6, got {degree!r}')

    p_k, p_l = _monic(k), _monic(l)
    scale = max(1., wilson_norm(max(k, l)))

    def integrand(t):
        s = t * t
        return np.polyval(p_k, s) * np.polyval(p_l, s) * _orthogonality_weight(t)

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', IntegrationWarning)
        integral, error = quad(integrand, 0., QUADRATURE_CUTOFF, epsabs=QUADRATURE_EPSABS, limit=200)

    if error > QUADRATURE_TOLERANCE * scale:
        raise QuadratureFailure(f'quadrature error {error:.3g} for <p_{k}, p_{l}> exceeds the tolerance')

    expected = wilson_norm(k) if k == l else 0.
    logger.debug('<p_%d, p_%d> = %.12g (error %.3g)', k, l, integral, error)

    return abs(integral - expected) / scale


def _check_k(size, k):
    if isinstance(k, bool) or not isinstance(k, int) or not 0 <= k <= size.m:
        raise DomainError(f'k={k!r} outside 0..{size.m}')


def _as_count(value, label):
    if not (value.is_integer and value >= 0):
        logger.error('%s is not a non-negative integer: %s', label, value)
        raise NonIntegerResult(value, label)
    return int(value)


def _prefactor(n, m):
    """ Powers of 2 and 3 and the factorial products shared by both count formulas. """
    value = (Integer(2)**(n * n - n - m * m - m) * factorial(n - m)
             / Integer(3)**(2 * m * m - m - n * n + n - m * n))

    for j in range(1, n + 1):
        value *= factorial(2 * j - 2) / factorial(4 * j - 3)
    for j in range(1, m + 1):
        value *= factorial(6 * j - 2) / factorial(4 * j - 1)

    return value


@lru_cache(maxsize=None)
def _count_unrefined(n, m):
    value = _prefactor(n, m)
    for j in range(m + 1, n + 1):
        value /= factorial(j - 1)

    if n > m:
        rows = [[wilson_poly(m + j, Rational(-(l + 1)**2, 9)) for j in range(n - m)] for l in range(n - m)]
        value *= Matrix(rows).det(method='bareiss')

    return value


def count_Nk(n, m, k):
    """
    Number of states with exactly k turns of type k_+, from the Wilson determinant.

    Parameters
    ----------
    n, m : int
        Lattice size.
    k : int
        Number of k_+ turns, 0 <= k <= m.

    Returns
    -------
    count : int

    Raises
    ------
    NonIntegerResult
        If the exact evaluation is not a non-negative integer.
    """
    size = LatticeSize(n, m)
    _check_k(size, k)

    return _as_count(binomial(m, k) * _count_unrefined(size.n, size.m), f'N_{k}({n},{m})')


@lru_cache(maxsize=None)
def _hypersum_unrefined(n, m):
    value = _prefactor(n, m)
    for j in range(m + 1, n + 1):
        value *= rf(Rational(5, 6), j - 1) * rf(Rational(4, 3), j - 1)
    for j in range(1, n - m + 1):
        value *= rf(Rational(5, 2) + 2 * n - 2 * j, j - 1) / (rf(1 - n, j - 1) * rf(m + Rational(3, 2), j - 1))

    def term(i, l):
        return (rf(Rational(1 - i, 3), l) * rf(Rational(1 + i, 3), l) * rf(1 - n, l) * rf(m + Rational(3, 2), l)
                / (rf(Rational(5, 6), l) * rf(Rational(4, 3), l) * factorial(l)**2))

    terms = [[term(i, l) for l in range(n)] for i in range(1, n - m + 1)]

    total = Integer(0)
    for ls in permutations(range(n), n - m):
        summand = Integer(1)
        for i, l in enumerate(ls):
            summand *= terms[i][l]
        for a, b in combinations(ls, 2):
            summand *= a - b
        total += summand

    return value * total


def count_Nk_hypersum(n, m, k):
    """ Same count as :func:`count_Nk` from the (n-m)-fold hypergeometric sum. """
    size = LatticeSize(n, m)
    _check_k(size, k)

    return _as_count(binomial(m, k) * _hypersum_unrefined(size.n, size.m), f'hypersum N_{k}({n},{m})')


@dataclass(frozen=True)
class CountReport:
    """
    Refined state counts of one lattice size.

    Attributes
    ----------
    n, m : int
        Lattice size.
    counts : tuple of int
        N_0, ..., N_m.
    total : int
        Sum of the counts.
    """
    n: int
    m: int
    counts: tuple
    total: int

    def __post_init__(self):
        if len(self.counts) != self.m + 1 or any(count < 0 for count in self.counts):
            raise DomainError(f'expected {self.m + 1} non-negative counts, got {self.counts}')
        if self.total != sum(self.counts) or self.total < 1:
            raise DomainError(f'total {self.total} does not match the counts {self.counts}')

    def to_dict(self):
        return {'n': self.n, 'm': self.m, 'N': [str(count) for count in self.counts], 'total': str(self.total)}


def _brute_counts(size):
    counts = [0] * (size.m + 1)
    for state in all_states(size):
        counts[state_turns(state).count(TurnKind.K_PLUS)] += 1
    return counts


def count_total(n, m, method='wilson'):
    """
    Counts the states of an (n, m) lattice, refined by the number of k_+ turns.

    Parameters
    ----------
    n, m : int
        Lattice size.
    method : string
        'wilson' (determinant), 'hypersum' (multi-sum) or 'brute' (enumeration).

    Returns
    -------
    report : :obj:`CountReport`
    """
    size = LatticeSize(n, m)

    if method == 'wilson':
        counts = [count_Nk(n, m, k) for k in range(m + 1)]
    elif method == 'hypersum':
        counts = [count_Nk_hypersum(n, m, k) for k in range(m + 1)]
    elif method == 'brute':
        counts = _brute_counts(size)
    else:
        raise DomainError(f'unknown counting method {method!r}, expected one of {METHODS}')

    logger.info('counted %s states of size %s with %s', sum(counts), size, method)
    return CountReport(n, m, tuple(counts), sum(counts))


def count_polynomial(report):
    """ The generating polynomial sum_k N_k z^k of a :obj:`CountReport`. """
    return Poly(list(reversed(report.counts)), Symbol('z'))


def specialized_state_weight(n, m, k, zeta, phi):
    """
    Weight shared by every state with k turns of type k_+ at gamma = 4 pi i/3,
    lambda_i = gamma and mu_j = 0.

    Returns
    -------
    weight : complex
        (-1)^{C(m,2)-nm+n} phi^{n-m} e^{(C(m+1,2)-nm) gamma} f(gamma)^{n-m}
        (e^{2 zeta} - e^{-2 gamma})^k ((e^{2 zeta} - e^{2 gamma}) / e^{2 gamma})^{m-k}
    """
    size = LatticeSize(n, m)
    _check_k(size, k)

    gamma = ENUMERATION_GAMMA
    zeta, phi = complex(zeta), complex(phi)
    sign = (-1)**(m * (m - 1) // 2 - n * m + n)

    value = (sign * phi**(n - m) * np.exp((m * (m + 1) // 2 - n * m) * gamma) * f(gamma)**(n - m)
             * (np.exp(2. * zeta) - np.exp(-2. * gamma))**k
             * ((np.exp(2. * zeta) - np.exp(2. * gamma)) / np.exp(2. * gamma))**(m - k))

    return complex(value)


def predict_Z_spec(n, m, k, zeta, phi):
    """
    Partition function restricted to k turns of type k_+ at the specialization of
    :func:`specialized_state_weight`, predicted from the exact count N_k.
    """
    return count_Nk(n, m, k) * specialized_state_weight(n, m, k, zeta, phi)
