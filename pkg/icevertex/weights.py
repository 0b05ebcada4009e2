""" Vertex and turn weights, the brute-force partition function and the R/K-matrix checks. """

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

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from icevertex.errors import DomainError, NonFiniteValue, PoleError
from icevertex.lattice import LatticeSize, RowHalf, TurnKind, VertexKind
from icevertex.lattice import all_states, enumerate_states, row_half, shard_prefixes, state_kinds, state_turns
from icevertex.utils import fsum_complex, max_workers, uniform_complex

logger = logging.getLogger(__name__)

# Denominators with a smaller modulus are treated as poles
POLE_TOLERANCE = 1e-13

# Crossing parameter at which every state of a given turn signature has the same weight
ENUMERATION_GAMMA = complex(0., 4. * np.pi / 3.)

IDENTITY = np.eye(2, dtype=complex)
PERMUTATION = np.array([[1, 0, 0, 0],
                        [0, 0, 1, 0],
                        [0, 1, 0, 0],
                        [0, 0, 0, 1]], dtype=complex)


def f(x):
    """ f(x) = 2 sinh(x). """
    return 2. * np.sinh(x)


def h(x):
    """ h(x) = 2 cosh(x). """
    return 2. * np.cosh(x)


def _finite(value, label):
    if not np.isfinite(value):
        raise NonFiniteValue(f'{label} evaluated to {value}')
    return complex(value)


def nonvanishing(value, factor, where=None):
    """ Returns ``value`` or raises :obj:`PoleError` naming ``factor`` if it vanishes. """
    if abs(value) < POLE_TOLERANCE:
        logger.warning('vanishing denominator %s = %s', factor, value)
        raise PoleError(factor, where)
    return value


@dataclass(frozen=True)
class ModelParams:
    """
    Parameters of the model.

    Attributes
    ----------
    gamma : complex
        Crossing parameter, not in 2 pi i Z.
    zeta : complex
        Boundary parameter of the reflecting end.
    phi : complex
        Weight constant of the creation turn.
    lambdas : tuple of complex
        Spectral parameters of the n double rows, bottom first.
    mus : tuple of complex
        Spectral parameters mu_1..mu_m. Column c (from the left) carries mu_{m+1-c}.
    """
    gamma: complex
    zeta: complex
    phi: complex
    lambdas: tuple
    mus: tuple = ()

    def __post_init__(self):
        for name in ('gamma', 'zeta', 'phi'):
            object.__setattr__(self, name, _finite(complex(getattr(self, name)), name))
        object.__setattr__(self, 'lambdas', tuple(_finite(complex(x), 'lambda') for x in self.lambdas))
        object.__setattr__(self, 'mus', tuple(_finite(complex(x), 'mu') for x in self.mus))

        LatticeSize(len(self.lambdas), len(self.mus))

        if abs(np.exp(self.gamma) - 1.) < POLE_TOLERANCE:
            raise DomainError(f'gamma={self.gamma} lies in 2 pi i Z')

    @property
    def size(self):
        """ Lattice size implied by the number of spectral parameters. """
        return LatticeSize(len(self.lambdas), len(self.mus))

    def column_mu(self, col):
        """ Spectral parameter of column ``col``, counted from the left. """
        return self.mus[len(self.mus) - col]

    def replace(self, **changes):
        """ Returns a copy with some fields replaced. """
        return replace(self, **changes)


def genericity_factors(params):
    """
    Yields (label, value) for every denominator the weights and the determinant
    formulas may divide by.
    """
    gamma, lambdas, mus = params.gamma, params.lambdas, params.mus

    yield 'f(gamma)', f(gamma)

    for i, lam_i in enumerate(lambdas, start=1):
        for j, lam_j in enumerate(lambdas, start=1):
            if i < j:
                yield f'f(lambda_{i}-lambda_{j})', f(lam_i - lam_j)
            if i <= j:
                yield f'f(lambda_{i}+lambda_{j}+gamma)', f(lam_i + lam_j + gamma)
            if i != j:
                yield f'f(lambda_{i}-lambda_{j}+gamma)', f(lam_i - lam_j + gamma)

    for i, mu_i in enumerate(mus, start=1):
        for j, mu_j in enumerate(mus, start=1):
            if i < j:
                yield f'f(mu_{j}+mu_{i})', f(mu_j + mu_i)
                yield f'f(mu_{j}-mu_{i})', f(mu_j - mu_i)

    for j, mu in enumerate(mus, start=1):
        for i, lam in enumerate(lambdas, start=1):
            yield f'f(lambda_{i}+mu_{j}+gamma)', f(lam + mu + gamma)
            yield f'f(lambda_{i}-mu_{j}+gamma)', f(lam - mu + gamma)
            yield f'f(mu_{j}-lambda_{i}+gamma)', f(mu - lam + gamma)
            yield f'f(-mu_{j}-lambda_{i}+gamma)', f(-mu - lam + gamma)

    for k in range(1, len(lambdas) + 1):
        yield f'1-exp(-{2 * k}*gamma)', 1. - np.exp(-2 * k * gamma)


def is_generic(params, eps):
    """ True if every denominator of :func:`genericity_factors` has modulus at least ``eps``. """
    return all(abs(value) >= eps for _, value in genericity_factors(params))


def sample_params(size, rng, eps=0.05, max_tries=1000, **fixed):
    """
    Draws generic parameters with real and imaginary parts uniform in [-1, 1].

    Parameters
    ----------
    size : :obj:`LatticeSize`
        Determines the number of lambdas and mus.
    rng : :obj:`numpy.random.Generator`
        Source of randomness.
    eps : float
        Lower bound on the modulus of every denominator.
    max_tries : int
        Number of redraws before giving up.
    fixed : dict
        Field values that override the draw (the draw is still consumed).

    Returns
    -------
    params : :obj:`ModelParams`
    """
    n, m = size.n, size.m

    for _ in range(max_tries):
        draws = uniform_complex(rng, 3 + n + m)
        values = {'gamma': draws[0], 'zeta': draws[1], 'phi': draws[2],
                  'lambdas': tuple(draws[3:3 + n]), 'mus': tuple(draws[3 + n:])}
        values.update(fixed)
        try:
            params = ModelParams(**values)
        except DomainError:
            continue
        if is_generic(params, eps):
            return params

    raise DomainError(f'no generic parameters found for {size} after {max_tries} draws')


def local_weight(kind, arg, gamma):
    """
    Weight of a vertex.

    Parameters
    ----------
    kind : :obj:`VertexKind`
        Vertex kind.
    arg : complex
        Spectral argument, see :func:`vertex_argument`.
    gamma : complex
        Crossing parameter.

    Returns
    -------
    weight : complex
        a = 1, b_pm = e^{-+gamma} f(arg)/f(arg+gamma), c_pm = e^{+-arg} f(gamma)/f(arg+gamma).
    """
    if kind in (VertexKind.A_PLUS, VertexKind.A_MINUS):
        return complex(1.)

    denominator = nonvanishing(f(arg + gamma), 'f(arg+gamma)')

    if kind is VertexKind.B_PLUS:
        value = np.exp(-gamma) * f(arg) / denominator
    elif kind is VertexKind.B_MINUS:
        value = np.exp(gamma) * f(arg) / denominator
    elif kind is VertexKind.C_PLUS:
        value = np.exp(arg) * f(gamma) / denominator
    else:
        value = np.exp(-arg) * f(gamma) / denominator

    return _finite(value, kind.name)


def turn_weight(kind, lam, params):
    """ Weight of a turn: k_pm = e^{zeta-+lam} f(zeta+-lam) and k_c = phi f(2 lam). """
    zeta = params.zeta

    if kind is TurnKind.K_PLUS:
        value = np.exp(zeta - lam) * f(zeta + lam)
    elif kind is TurnKind.K_MINUS:
        value = np.exp(zeta + lam) * f(zeta - lam)
    else:
        value = params.phi * f(2. * lam)

    return _finite(value, kind.name)


def vertex_argument(half, lam, mu):
    """ Spectral argument of a vertex: lam - mu on upper rows, lam + mu on lower rows. """
    return lam - mu if RowHalf(half) is RowHalf.UPPER else lam + mu


class _SiteWeights:
    """ Lazily evaluated vertex weights per (row, col, kind) for one parameter set. """

    def __init__(self, params):
        self.params = params
        self.cache = {}

    def __call__(self, row, col, kind):
        key = (row, col, kind)
        if key not in self.cache:
            lam = self.params.lambdas[(row - 1) // 2]
            arg = vertex_argument(row_half(row), lam, self.params.column_mu(col))
            try:
                self.cache[key] = local_weight(kind, arg, self.params.gamma)
            except PoleError as err:
                raise PoleError(err.factor, f'vertex ({row}, {col})') from err
        return self.cache[key]


def _check_size(state, params):
    if state.size != params.size:
        raise DomainError(f'state of size {state.size} does not match parameters of size {params.size}')


def state_weight(state, params, site_weights=None):
    """
    Product of all vertex and turn weights of a state.

    Parameters
    ----------
    state : :obj:`LatticeState`
        A valid state.
    params : :obj:`ModelParams`
        Model parameters of matching size.
    site_weights : callable, optional
        Cache of vertex weights shared between states.

    Returns
    -------
    weight : complex
    """
    _check_size(state, params)
    site_weights = site_weights or _SiteWeights(params)

    weight = complex(1.)
    for row, kinds in enumerate(state_kinds(state), start=1):
        for col, kind in enumerate(kinds, start=1):
            weight *= site_weights(row, col, kind)
    for lam, turn in zip(params.lambdas, state_turns(state)):
        weight *= turn_weight(turn, lam, params)

    return weight


def _selected(states, k):
    if k is None:
        return states
    return [state for state in states if state_turns(state).count(TurnKind.K_PLUS) == k]


def _shard_terms(params, prefix, k):
    site_weights = _SiteWeights(params)
    return [state_weight(state, params, site_weights)
            for state in _selected(list(enumerate_states(params.size, prefix)), k)]


def _brute_terms(params, k, workers):
    workers = max_workers() if workers is None else workers
    prefixes = shard_prefixes(params.size)

    if workers > 1 and len(prefixes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = pool.map(_shard_terms, [params] * len(prefixes), prefixes, [k] * len(prefixes))
            return [term for shard in shards for term in shard]

    site_weights = _SiteWeights(params)
    return [state_weight(state, params, site_weights) for state in _selected(all_states(params.size), k)]


def partition_brute(params, workers=None):
    """
    Partition function as the sum of all state weights.

    Parameters
    ----------
    params : :obj:`ModelParams`
        Model parameters.
    workers : int, optional
        Worker processes for sharded summation; defaults to ICEVERTEX_THREADS.

    Returns
    -------
    value : complex
        Correctly rounded sum, independent of the sharding.
    """
    terms = _brute_terms(params, None, workers)
    logger.debug('summed %d state weights for %s', len(terms), params.size)
    return fsum_complex(terms)


def partition_brute_fixed_k(params, k, workers=None):
    """ Partition function restricted to the states with exactly k turns of type k_+. """
    if isinstance(k, bool) or not isinstance(k, int) or not 0 <= k <= params.size.m:
        raise DomainError(f'k={k} outside 0..{params.size.m}')
    return fsum_complex(_brute_terms(params, k, workers))


def r_matrix(x, gamma):
    """ R-matrix in the basis (++, +-, -+, --). """
    a_plus = local_weight(VertexKind.A_PLUS, x, gamma)
    a_minus = local_weight(VertexKind.A_MINUS, x, gamma)
    b_plus = local_weight(VertexKind.B_PLUS, x, gamma)
    b_minus = local_weight(VertexKind.B_MINUS, x, gamma)
    c_plus = local_weight(VertexKind.C_PLUS, x, gamma)
    c_minus = local_weight(VertexKind.C_MINUS, x, gamma)

    return np.array([[a_plus, 0, 0, 0],
                     [0, b_plus, c_minus, 0],
                     [0, c_plus, b_minus, 0],
                     [0, 0, 0, a_minus]], dtype=complex)


def k_matrix(lam, params):
    """ Upper triangular reflection matrix [[k_+, k_c], [0, k_-]]. """
    return np.array([[turn_weight(TurnKind.K_PLUS, lam, params), turn_weight(TurnKind.K_CREATE, lam, params)],
                     [0, turn_weight(TurnKind.K_MINUS, lam, params)]], dtype=complex)


def _scaled_residual(lhs, rhs):
    return float(np.max(np.abs(lhs - rhs)) / max(1., np.max(np.abs(lhs))))


def ybe_residual(l1, l2, l3, gamma):
    """
    Residual of R12(l1-l2) R13(l1-l3) R23(l2-l3) = R23(l2-l3) R13(l1-l3) R12(l1-l2).

    Returns
    -------
    residual : float
        Max-norm of the difference divided by max(1, max-norm of the left side).
    """
    swap = np.kron(IDENTITY, PERMUTATION)
    r12 = np.kron(r_matrix(l1 - l2, gamma), IDENTITY)
    r13 = swap @ np.kron(r_matrix(l1 - l3, gamma), IDENTITY) @ swap
    r23 = np.kron(IDENTITY, r_matrix(l2 - l3, gamma))

    return _scaled_residual(r12 @ r13 @ r23, r23 @ r13 @ r12)


def reflection_residual(l, lp, params):
    """
    Residual of the reflection equation
    R(l-lp) K0(l) R'(l+lp) K0'(lp) = K0'(lp) R(l+lp) K0(l) R'(l-lp), where R' = P R P.
    """
    k0 = np.kron(k_matrix(l, params), IDENTITY)
    k0p = np.kron(IDENTITY, k_matrix(lp, params))
    difference = r_matrix(l - lp, params.gamma)
    total = r_matrix(l + lp, params.gamma)

    lhs = difference @ k0 @ PERMUTATION @ total @ PERMUTATION @ k0p
    rhs = k0p @ total @ k0 @ PERMUTATION @ difference @ PERMUTATION

    return _scaled_residual(lhs, rhs)
