""" Named numeric and exact checks of the model, run as a suite. """

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
from math import comb

import numpy as np

from icevertex.asm import enumerate_matrices, matrix_to_state, matrix_turns, state_to_matrix, validate_matrix
from icevertex.counting import count_Nk, count_Nk_hypersum, count_total, orthogonality_residual, predict_Z_spec
from icevertex.detform import Swap, check_limit_chain, check_limit_step, check_periodicity, check_polynomiality
from icevertex.detform import check_recursion, check_symmetry, det_partition, det_partition_appendix
from icevertex.detform import homogeneous_limit
from icevertex.errors import DomainError, NonIntegerResult, PoleError
from icevertex.lattice import LatticeSize, TurnKind, all_states, state_turns
from icevertex.utils import max_workers, relative_difference, rng_stream, uniform_complex
from icevertex.weights import ENUMERATION_GAMMA, ModelParams, f, partition_brute, partition_brute_fixed_k
from icevertex.weights import reflection_residual, sample_params, ybe_residual

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    'appendix-det': 1e-9,
    'base': 1e-12,
    'bijection': 0.,
    'counts': 0.,
    'homogeneous': 1e-5,
    'hypersum': 0.,
    'integrality': 0.,
    'limit': 1e-6,
    'limit-chain': 1e-6,
    'oracle': 1e-9,
    'orthogonality': 1e-6,
    'periodicity': 1e-10,
    'polynomiality': 1e-6,
    'recursion': 1e-9,
    'reflection': 1e-12,
    'specialization': 1e-8,
    'symmetry': 1e-9,
    'ybe': 1e-12,
}

# A fit of too low a degree must miss by more than this
POLYNOMIALITY_CONTROL = 1e-3

# Largest n visited by checks that enumerate states or evaluate slow formulas
SIZE_LIMITS = {'bijection': 4, 'counts': 4, 'homogeneous': 3, 'hypersum': 6, 'integrality': 8, 'limit': 3,
               'limit-chain': 3, 'oracle': 3, 'specialization': 3}

# Draw multiplier of the ybe and reflection checks
EQUATION_DRAWS = 5


@dataclass(frozen=True)
class SuiteSettings:
    """
    Settings shared by every check of a suite run.

    Attributes
    ----------
    seed : int
        64-bit master seed; each check draws from its own labelled stream.
    n : int
        Largest number of double rows visited.
    m : int, optional
        Restricts the checks to this number of vertical lines.
    draws : int
        Random draws per lattice size.
    """
    seed: int = 0
    n: int = 3
    m: int = None
    draws: int = 20


@dataclass(frozen=True)
class CheckReport:
    """ Outcome of one named check. """
    name: str
    draws: int
    max_residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.max_residual <= self.tolerance)

    def to_dict(self):
        return {'name': self.name, 'draws': self.draws, 'maxResidual': self.max_residual,
                'tolerance': self.tolerance, 'pass': self.passed}


def _sizes(settings, name, m_min=0, below_n=False):
    n_max = min(settings.n, SIZE_LIMITS.get(name, settings.n))
    for n in range(1, n_max + 1):
        for m in range(m_min, n if below_n else n + 1):
            if settings.m is None or m == settings.m:
                yield LatticeSize(n, m)


def _collect(draws, evaluate, attempts=10):
    """ Evaluates ``draws`` residuals, redrawing whenever a draw lands on a pole. """
    residuals = []

    for _ in range(draws * attempts):
        if len(residuals) == draws:
            break
        try:
            residuals.append(float(evaluate()))
        except PoleError as err:
            logger.debug('redrawing after %s', err)

    if len(residuals) < draws:
        raise DomainError(f'only {len(residuals)} of {draws} draws avoided the poles')

    return residuals


def _per_size(settings, name, rng, evaluate, **size_options):
    residuals = []
    for size in _sizes(settings, name, **size_options):
        residuals += _collect(settings.draws, lambda: evaluate(size, rng))
    return residuals


def _check_ybe(settings, rng):
    def evaluate():
        l1, l2, l3, gamma = uniform_complex(rng, 4)
        return ybe_residual(l1, l2, l3, gamma)

    return _collect(EQUATION_DRAWS * settings.draws, evaluate)


def _check_reflection(settings, rng):
    def evaluate():
        params = sample_params(LatticeSize(2, 0), rng)
        return reflection_residual(*params.lambdas, params)

    return _collect(EQUATION_DRAWS * settings.draws, evaluate)


def _check_oracle(settings, rng):
    def evaluate(size, rng):
        params = sample_params(size, rng)
        return relative_difference(partition_brute(params), det_partition(params).value)

    return _per_size(settings, 'oracle', rng, evaluate)


def _check_base(settings, rng):
    def evaluate(size, rng):
        params = sample_params(size, rng)
        product = params.phi**size.n * np.prod([f(2. * lam) for lam in params.lambdas])
        return relative_difference(product, det_partition(params).value)

    return _per_size(replace(settings, m=0), 'base', rng, evaluate)


def _check_appendix(settings, rng):
    def evaluate(size, rng):
        params = sample_params(size, rng)
        return relative_difference(det_partition(params).value, det_partition_appendix(params).value)

    return _per_size(settings, 'appendix-det', rng, evaluate)


def _random_pair(rng, count):
    i, j = rng.choice(count, size=2, replace=False) + 1
    return int(i), int(j)


def _check_symmetry(settings, rng):
    def evaluate(size, rng):
        params = sample_params(size, rng)
        residual = 0.
        if size.n > 1:
            residual = max(residual, check_symmetry(params, Swap('lambda', *_random_pair(rng, size.n))))
        if size.m > 1:
            residual = max(residual, check_symmetry(params, Swap('mu', *_random_pair(rng, size.m))))
        return residual

    return _per_size(settings, 'symmetry', rng, evaluate)


def _check_polynomiality(settings, rng):
    def evaluate(size, rng):
        params = sample_params(size, rng)
        j = int(rng.integers(1, size.m + 1))
        residual = check_polynomiality(params, j)
        control = check_polynomiality(params, j, degree=2 * size.n - 2)
        if control <= POLYNOMIALITY_CONTROL:
            logger.warning('degree %d fit matched to %.3g for %s', 2 * size.n - 2, control, size)
            return max(residual, 1.)
        return residual

    return _per_size(settings, 'polynomiality', rng, evaluate, m_min=1)


def _check_recursion(settings, rng):
    def evaluate(size, rng):
        params = sample_params(size, rng)
        k = int(rng.integers(1, size.m + 1))
        l = int(rng.integers(1, size.n + 1))
        sign = int(rng.choice([1, -1]))
        return check_recursion(params, k, l, sign)

    return _per_size(settings, 'recursion', rng, evaluate, m_min=1)


def _check_limit(settings, rng):
    def evaluate(size, rng):
        return check_limit_step(sample_params(size, rng))

    return _per_size(settings, 'limit', rng, evaluate, m_min=1)


def _check_limit_chain(settings, rng):
    def evaluate(size, rng):
        return check_limit_chain(sample_params(size, rng))

    return _per_size(settings, 'limit-chain', rng, evaluate, below_n=True)


def _check_periodicity(settings, rng):
    def evaluate(size, rng):
        params = sample_params(size, rng)
        kind = 'mu' if size.m and rng.random() < 0.5 else 'lambda'
        count = size.m if kind == 'mu' else size.n
        return check_periodicity(params, kind, int(rng.integers(1, count + 1)))

    return _per_size(settings, 'periodicity', rng, evaluate)


def _specialized_params(size, rng):
    zeta, phi = uniform_complex(rng, 2)
    return ModelParams(ENUMERATION_GAMMA, zeta, phi, (ENUMERATION_GAMMA,) * size.n, (0.,) * size.m)


def _check_specialization(settings, rng):
    residuals = []
    for size in _sizes(settings, 'specialization'):
        params = _specialized_params(size, rng)
        for k in range(size.m + 1):
            predicted = predict_Z_spec(size.n, size.m, k, params.zeta, params.phi)
            residuals.append(relative_difference(predicted, partition_brute_fixed_k(params, k)))
    return residuals


def _check_homogeneous(settings, rng):
    residuals = []
    for size in _sizes(settings, 'homogeneous'):
        params = _specialized_params(size, rng)
        predicted = sum(predict_Z_spec(size.n, size.m, k, params.zeta, params.phi) for k in range(size.m + 1))
        residuals.append(relative_difference(predicted, homogeneous_limit(size.n, size.m, params.zeta, params.phi)))
    return residuals


def _check_orthogonality(settings, rng):
    return [orthogonality_residual(k, l) for k in range(7) for l in range(k + 1)]


def _check_counts(settings, rng):
    residuals = []
    for size in _sizes(settings, 'counts'):
        formula = count_total(size.n, size.m, 'wilson').counts
        brute = count_total(size.n, size.m, 'brute').counts
        residuals.append(sum(a != b for a, b in zip(formula, brute)))
    return residuals


def _check_hypersum(settings, rng):
    return [float(count_Nk(size.n, size.m, k) != count_Nk_hypersum(size.n, size.m, k))
            for size in _sizes(settings, 'hypersum') for k in range(size.m + 1)]


def _check_integrality(settings, rng):
    residuals = []
    for size in _sizes(settings, 'integrality'):
        try:
            counts = [count_Nk(size.n, size.m, k) for k in range(size.m + 1)]
        except NonIntegerResult:
            residuals.append(1.)
            continue
        # N_k = C(m, k) N_0
        residuals.append(float(sum(count != comb(size.m, k) * counts[0] for k, count in enumerate(counts))))
    return residuals


def _check_bijection(settings, rng):
    residuals = []
    for size in _sizes(settings, 'bijection'):
        states = all_states(size)
        matrices = [state_to_matrix(state) for state in states]
        mismatches = len(matrices) - len(set(matrices))
        mismatches += sum(bool(validate_matrix(mat)) for mat in matrices)
        mismatches += sum(matrix_to_state(mat) != state for mat, state in zip(matrices, states))
        mismatches += sum(matrix_turns(mat) != state_turns(state) for mat, state in zip(matrices, states))
        mismatches += len(set(matrices) ^ set(enumerate_matrices(size)))

        refined = [0] * (size.m + 1)
        for mat in matrices:
            refined[matrix_turns(mat).count(TurnKind.K_PLUS)] += 1
        mismatches += sum(refined[k] != count_Nk(size.n, size.m, k) for k in range(size.m + 1))

        residuals.append(float(mismatches))
    return residuals


CHECKS = {
    'appendix-det': _check_appendix,
    'base': _check_base,
    'bijection': _check_bijection,
    'counts': _check_counts,
    'homogeneous': _check_homogeneous,
    'hypersum': _check_hypersum,
    'integrality': _check_integrality,
    'limit': _check_limit,
    'limit-chain': _check_limit_chain,
    'oracle': _check_oracle,
    'orthogonality': _check_orthogonality,
    'periodicity': _check_periodicity,
    'polynomiality': _check_polynomiality,
    'recursion': _check_recursion,
    'reflection': _check_reflection,
    'specialization': _check_specialization,
    'symmetry': _check_symmetry,
    'ybe': _check_ybe,
}


def resolve_tolerances(overrides=None):
    """ Merges tolerance overrides into :data:`DEFAULT_TOLERANCES`. """
    tolerances = dict(DEFAULT_TOLERANCES)

    for name, value in (overrides or {}).items():
        if name not in CHECKS:
            raise DomainError(f'unknown check {name!r} in tolerance override')
        if not value > 0:
            raise DomainError(f'tolerance for {name} must be positive, got {value}')
        tolerances[name] = float(value)

    return tolerances


def run_check(name, settings, tolerance=None):
    """
    Runs one named check.

    Parameters
    ----------
    name : string
        Key of :data:`CHECKS`.
    settings : :obj:`SuiteSettings`
        Seed, sizes and number of draws.
    tolerance : float, optional
        Defaults to the entry of :data:`DEFAULT_TOLERANCES`.

    Returns
    -------
    report : :obj:`CheckReport`
    """
    if name not in CHECKS:
        raise DomainError(f'unknown check {name!r}, expected one of {sorted(CHECKS)}')

    tolerance = DEFAULT_TOLERANCES[name] if tolerance is None else tolerance
    residuals = CHECKS[name](settings, rng_stream(settings.seed, name))
    if not residuals:
        logger.warning('check %s had nothing to evaluate for n<=%d, m=%s', name, settings.n, settings.m)

    report = CheckReport(name, len(residuals), float(max(residuals, default=0.)), tolerance)
    logger.info('%s: %d draws, max residual %.3g, tolerance %.3g, %s', name, report.draws,
                report.max_residual, tolerance, 'pass' if report.passed else 'FAIL')

    return report


def run_checks(names, settings, tolerances=None, workers=None):
    """
    Runs several checks, concurrently when more than one worker is allowed.

    Returns
    -------
    reports : list of :obj:`CheckReport`
        Sorted by check name.
    """
    names = sorted(set(names))
    tolerances = resolve_tolerances(tolerances)
    workers = max_workers() if workers is None else workers

    if workers > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_check, names, [settings] * len(names),
                                    [tolerances[name] for name in names]))
    else:
        reports = [run_check(name, settings, tolerances[name]) for name in names]

    return sorted(reports, key=lambda report: report.name)
