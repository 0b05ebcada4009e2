"""
Unit and regression tests for the icevertex.utils module.
"""

import pytest

from icevertex.errors import DomainError
from icevertex.utils import fsum_complex
from icevertex.utils import max_workers
from icevertex.utils import relative_difference
from icevertex.utils import richardson
from icevertex.utils import rng_stream


def test_fsum_complex():
    """ Unit test for the fsum_complex function."""

    values = [1e16 + 1j, 1. - 1e16j, -1e16 + 1e16j]

    assert fsum_complex(values) == 1. + 1j
    assert fsum_complex(values) == fsum_complex(reversed(values))


def test_relative_difference():
    """ Unit test for the relative_difference function."""

    assert relative_difference(2., 1.) == pytest.approx(0.5)
    assert relative_difference(2j, 2j) == 0.
    assert relative_difference(0., 1e-3) == pytest.approx(1e-3)


def test_rng_stream():
    """ Streams depend only on the seed and the label."""

    first = rng_stream(7, 'ybe').uniform(size=4)
    again = rng_stream(7, 'ybe').uniform(size=4)
    other = rng_stream(7, 'oracle').uniform(size=4)

    assert (first == again).all()
    assert not (first == other).all()


@pytest.mark.parametrize('seed', [-1, 2**64])
def test_rng_stream_bad_seed(seed):
    """ Seeds must be 64-bit unsigned integers."""

    with pytest.raises(DomainError):
        rng_stream(seed, 'label')


def test_richardson():
    """ Richardson extrapolation removes the first and second order terms."""

    step = 0.1
    values = [3. + 2. * h - 5. * h**2 for h in (step, step / 2., step / 4.)]

    assert richardson(values) == pytest.approx(3.)
    assert richardson(values[:1]) == values[0]


def test_max_workers(monkeypatch):
    """ The worker cap is read from ICEVERTEX_THREADS."""

    monkeypatch.delenv('ICEVERTEX_THREADS', raising=False)
    assert max_workers() == 1

    monkeypatch.setenv('ICEVERTEX_THREADS', '4')
    assert max_workers() == 4

    for value in ('0', 'many'):
        monkeypatch.setenv('ICEVERTEX_THREADS', value)
        with pytest.raises(DomainError):
            max_workers()
