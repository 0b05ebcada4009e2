"""
Unit and regression tests for the icevertex.verify module.
"""

import pytest

from icevertex.errors import DomainError
from icevertex.verify import CHECKS, DEFAULT_TOLERANCES, CheckReport, SuiteSettings
from icevertex.verify import resolve_tolerances, run_check, run_checks

SMALL = SuiteSettings(seed=7, n=2, draws=3)


def test_default_tolerances():
    """ Every check has a tolerance and the exact checks allow no mismatch."""

    assert sorted(DEFAULT_TOLERANCES) == sorted(CHECKS)
    for name in ('bijection', 'counts', 'hypersum', 'integrality'):
        assert DEFAULT_TOLERANCES[name] == 0.


def test_check_report():
    """ Unit test for the CheckReport class."""

    report = CheckReport('ybe', 4, 2e-13, 1e-12)

    assert report.passed
    assert report.to_dict() == {'name': 'ybe', 'draws': 4, 'maxResidual': 2e-13, 'tolerance': 1e-12, 'pass': True}
    assert not CheckReport('counts', 1, 1., 0.).passed


@pytest.mark.parametrize('name', ['ybe', 'reflection', 'oracle', 'base', 'appendix-det', 'symmetry',
                                  'recursion', 'periodicity', 'polynomiality', 'limit', 'limit-chain',
                                  'specialization', 'homogeneous', 'counts', 'hypersum', 'integrality', 'bijection'])
def test_checks_pass(name):
    """ Every check passes on small sizes."""

    report = run_check(name, SMALL)

    assert report.draws > 0
    assert report.passed, report


@pytest.mark.parametrize('name, n, draws', [('oracle', 3, 180), ('counts', 4, 14), ('bijection', 4, 14)])
def test_checks_at_default_scale(name, n, draws):
    """ The oracle with 20 draws per size up to n=3, counts and bijection up to n=4."""

    report = run_check(name, SuiteSettings(n=n, draws=20))

    assert report.draws == draws
    assert report.passed, report


def test_check_reproducible():
    """ The same seed gives the same residuals."""

    assert run_check('oracle', SMALL) == run_check('oracle', SMALL)


def test_restricted_m():
    """ Restricting m to a value no size reaches leaves nothing to evaluate."""

    report = run_check('oracle', SuiteSettings(seed=1, n=2, m=3, draws=2))

    assert report.draws == 0
    assert report.passed


def test_tolerance_override():
    """ A tolerance below the attainable accuracy makes a check fail."""

    assert not run_check('limit', SMALL, tolerance=1e-300).passed


def test_resolve_tolerances():
    """ Overrides must name a check and be positive."""

    assert resolve_tolerances({'ybe': 1e-6})['ybe'] == 1e-6
    assert resolve_tolerances()['oracle'] == DEFAULT_TOLERANCES['oracle']

    with pytest.raises(DomainError):
        resolve_tolerances({'nope': 1.})
    with pytest.raises(DomainError):
        resolve_tolerances({'ybe': 0.})


def test_run_checks():
    """ Reports come back sorted by name whatever the number of workers."""

    names = ['ybe', 'counts', 'base']
    serial = run_checks(names, SMALL, workers=1)

    assert [report.name for report in serial] == ['base', 'counts', 'ybe']
    assert run_checks(names, SMALL, workers=2) == serial

    with pytest.raises(DomainError):
        run_check('nope', SMALL)
