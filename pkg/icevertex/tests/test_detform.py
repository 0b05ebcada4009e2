"""
Unit and regression tests for the icevertex.detform module.
"""

import numpy as np
import pytest

from icevertex.counting import predict_Z_spec
from icevertex.detform import FORMULAS, DetReport, Swap
from icevertex.detform import check_limit_chain, check_limit_step, check_periodicity, check_polynomiality
from icevertex.detform import check_recursion, check_symmetry, ck_coefficient
from icevertex.detform import det_partition, det_partition_appendix, homogeneous_limit
from icevertex.errors import DomainError, PoleError
from icevertex.lattice import LatticeSize
from icevertex.utils import relative_difference, rng_stream
from icevertex.weights import ENUMERATION_GAMMA, ModelParams, f, partition_brute, sample_params

SIZES = [(n, m) for n in range(1, 4) for m in range(n + 1)]


def draw(n, m, label, seed=0):
    return sample_params(LatticeSize(n, m), rng_stream(seed, label))


@pytest.mark.parametrize('n, m', SIZES)
def test_det_matches_brute(n, m):
    """ The determinant formula agrees with the sum over states."""

    rng = rng_stream(n * 10 + m, 'det-brute')

    for _ in range(20):
        params = sample_params(LatticeSize(n, m), rng)
        report = det_partition(params)

        assert report.formula == 'cosh'
        assert report.condition_estimate >= 1.
        assert relative_difference(partition_brute(params), report.value) < 1e-9


@pytest.mark.parametrize('n, m', SIZES)
def test_appendix_formula(n, m):
    """ Both determinant formulas give the same partition function."""

    params = draw(n, m, 'appendix')
    report = det_partition_appendix(params)

    assert report.formula == 'ck'
    assert relative_difference(det_partition(params).value, report.value) < 1e-9


@pytest.mark.parametrize('n', [1, 2, 3, 4])
def test_det_no_columns(n):
    """ Without mus the determinant collapses to phi^n prod f(2 lambda_i)."""

    params = draw(n, 0, 'no-columns')
    expected = params.phi**n * np.prod([f(2. * lam) for lam in params.lambdas])

    assert relative_difference(expected, det_partition(params).value) < 1e-10


def test_det_n1_m1():
    """ Regression test against the closed form of the 2x1 lattice."""

    params = ModelParams(gamma=0.4 + 0.9j, zeta=-0.3 + 0.2j, phi=1.1 - 0.5j,
                         lambdas=(0.25 + 0.1j,), mus=(-0.6 + 0.35j,))
    gamma, zeta, lam, mu = params.gamma, params.zeta, params.lambdas[0], params.mus[0]
    expected = (np.exp(-gamma) * f(gamma) * np.exp(zeta + mu) * f(2. * lam) * f(zeta - mu)
                / (f(lam + mu + gamma) * f(lam - mu + gamma)))

    assert relative_difference(expected, det_partition(params).value) < 1e-12


def test_det_multiprecision():
    """ The mpmath evaluation agrees with the double precision one."""

    params = draw(3, 1, 'dps')

    assert relative_difference(det_partition(params).value, det_partition(params, dps=30).value) < 1e-10
    assert relative_difference(det_partition(params).value, det_partition_appendix(params, dps=30).value) < 1e-10


def test_det_report_to_dict():
    """ Unit test for DetReport.to_dict."""

    report = DetReport(1. - 2j, 3.5, FORMULAS[0])

    assert report.to_dict() == {'value': [1., -2.], 'cond': 3.5, 'formula': 'cosh'}


def test_det_pole():
    """ Coinciding mus are a pole of the formula."""

    params = draw(2, 2, 'pole')
    params = params.replace(mus=(params.mus[0], params.mus[0]))

    with pytest.raises(PoleError) as excinfo:
        det_partition(params)

    assert excinfo.value.factor == 'f(mu_2-mu_1)'


def test_ck_coefficient():
    """ C_0 = 1, C_1 = h(v) h(gamma) and C_k is even in v = 2 lambda + gamma."""

    lam, gamma = 0.3 - 0.2j, 0.5 + 0.4j
    v = 2. * lam + gamma

    assert ck_coefficient(0, lam, gamma) == 1.
    assert ck_coefficient(1, lam, gamma) == pytest.approx((np.exp(v) + np.exp(-v)) * (np.exp(gamma) + np.exp(-gamma)))

    for k in (2, 3):
        assert ck_coefficient(k, -lam - gamma, gamma) == pytest.approx(ck_coefficient(k, lam, gamma))

    with pytest.raises(DomainError):
        ck_coefficient(-1, lam, gamma)


def test_symmetry():
    """ The partition function is symmetric in the lambdas and in the mus."""

    params = draw(3, 2, 'symmetry')

    assert check_symmetry(params, Swap('lambda', 1, 3)) < 1e-10
    assert check_symmetry(params, Swap('mu', 1, 2)) < 1e-10
    assert check_symmetry(params, Swap('mu', 2, 2)) == 0.

    with pytest.raises(DomainError):
        check_symmetry(params, Swap('mu', 1, 3))
    with pytest.raises(DomainError):
        check_symmetry(params, Swap('nu', 1, 2))


def test_periodicity():
    """ The partition function is 2 pi i periodic in every spectral parameter."""

    params = draw(2, 2, 'periodicity')

    assert check_periodicity(params, 'lambda', 2) < 1e-10
    assert check_periodicity(params, 'mu', 1) < 1e-10


@pytest.mark.parametrize('n, m', [(1, 1), (2, 1), (2, 2), (3, 2)])
def test_polynomiality(n, m):
    """ The scaled partition function has degree 2n-1 in e^{2 mu_j}, not less."""

    params = draw(n, m, 'polynomiality')

    assert check_polynomiality(params, m) < 1e-6
    if n > 1:
        assert check_polynomiality(params, 1, degree=2 * n - 2) > 1e-3

    with pytest.raises(DomainError):
        check_polynomiality(params, 1, degree=2 * n)


@pytest.mark.parametrize('n, m', [(1, 1), (2, 1), (2, 2), (3, 1)])
def test_recursion(n, m):
    """ Setting mu_k = +-lambda_l reduces the system by one double row and one line."""

    params = draw(n, m, 'recursion')

    for sign in (1, -1):
        for l in range(1, n + 1):
            assert check_recursion(params, m, l, sign) < 1e-8

    with pytest.raises(DomainError):
        check_recursion(params, 1, 1, 0)


@pytest.mark.parametrize('n, m', [(1, 1), (2, 1), (2, 2), (3, 2)])
def test_limit_step(n, m):
    """ Sending the last mu to infinity gives the smaller system."""

    params = draw(n, m, 'limit')

    near = check_limit_step(params, R=10.)
    far = check_limit_step(params, R=20.)

    assert far < 1e-6
    assert near > 1e6 * far


def test_limit_step_needs_mu():
    """ Unit test for the check_limit_step input validation."""

    with pytest.raises(DomainError):
        check_limit_step(draw(2, 0, 'limit'))


@pytest.mark.parametrize('n, m', [(1, 0), (2, 0), (2, 1), (3, 1)])
def test_limit_chain(n, m):
    """ Sending n-m extra mus to infinity one after another gives back Z_{n,m}."""

    assert check_limit_chain(draw(n, m, 'chain')) < 1e-6

    with pytest.raises(DomainError):
        check_limit_chain(draw(n, n, 'chain'))


def test_homogeneous_no_columns():
    """ Regression test for the homogeneous limit of a single creation turn."""

    phi = 0.7 + 0.2j

    assert homogeneous_limit(1, 0, 0.3, phi) == pytest.approx(phi * f(2. * ENUMERATION_GAMMA), rel=1e-6)


@pytest.mark.parametrize('n, m', [(1, 1), (2, 1), (2, 2)])
def test_homogeneous_limit(n, m):
    """ The extrapolated determinant matches the counts at the special point."""

    zeta, phi = 0.3 - 0.4j, 1.2 + 0.1j
    expected = sum(predict_Z_spec(n, m, k, zeta, phi) for k in range(m + 1))

    assert relative_difference(expected, homogeneous_limit(n, m, zeta, phi)) < 1e-5

    with pytest.raises(DomainError):
        homogeneous_limit(n, m, zeta, phi, eps=0.)
