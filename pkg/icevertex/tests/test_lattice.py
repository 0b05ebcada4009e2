"""
Unit and regression tests for the icevertex.lattice module.
"""

import pytest

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from icevertex.errors import DomainError, ForbiddenTurn, IceRuleViolation, ParseError, SizeError
from icevertex.lattice import Arrow, LatticeSize, RowHalf, TurnKind, VertexKind
from icevertex.lattice import all_states, classify_vertex, enumerate_states, enumerate_states_sharded
from icevertex.lattice import orientation_spins, parse_state, row_half, serialize_state, shard_prefixes
from icevertex.lattice import state_kinds, state_stats, state_turns, turn_kind, validate_state, vertex_arrows

SIZES = [LatticeSize(n, m) for n in range(1, 4) for m in range(n + 1)]


@pytest.mark.parametrize('n, m', [(1, 2), (0, 0), (2, -1)])
def test_lattice_size_errors(n, m):
    """ Sizes need n >= 1 and 0 <= m <= n."""

    with pytest.raises(SizeError):
        LatticeSize(n, m)


def test_enumerate_n1_m1():
    """ The 2x1 lattice has one state per turn sign."""

    texts = [serialize_state(state) for state in enumerate_states(LatticeSize(1, 1))]

    assert texts == ['+\nC\nB\n', '-\nB\nc\n']


def test_enumerate_no_columns():
    """ Without vertical lines every turn is a creation turn."""

    for n in range(1, 5):
        states = list(enumerate_states(LatticeSize(n, 0)))
        assert len(states) == 1
        assert state_turns(states[0]) == (TurnKind.K_CREATE,) * n

    assert serialize_state(all_states(LatticeSize(1, 0))[0]) == '*\n'


@pytest.mark.parametrize('size, expected', [(LatticeSize(2, 1), 4), (LatticeSize(2, 2), 12)])
def test_enumerate_counts(size, expected):
    """ Regression test for the number of states of small lattices."""

    assert len(all_states(size)) == expected


@pytest.mark.parametrize('size', SIZES)
def test_enumerated_states_are_valid(size):
    """ Every enumerated state passes validation and survives the text format."""

    states = all_states(size)

    assert len(set(states)) == len(states)
    for state in states:
        assert validate_state(state) == []
        assert parse_state(serialize_state(state)) == state


@settings(deadline=None, max_examples=25)
@given(st.integers(min_value=1, max_value=3), st.integers(min_value=0, max_value=3), st.data())
def test_creation_turns(n, m, data):
    """ Every state has exactly n - m creation turns."""

    assume(m <= n)
    states = all_states(LatticeSize(n, m))
    state = states[data.draw(st.integers(min_value=0, max_value=len(states) - 1))]

    assert state_turns(state).count(TurnKind.K_CREATE) == n - m
    assert state_stats(state).nu(TurnKind.K_CREATE) == n - m


def test_vertex_arrows_invert_classification():
    """ vertex_arrows gives back the arrows around each classified vertex."""

    for state in all_states(LatticeSize(2, 2)):
        for row, kinds in enumerate(state_kinds(state), start=1):
            for col, kind in enumerate(kinds, start=1):
                arrows = (state.h_arrow(row, col - 1), state.h_arrow(row, col),
                          state.v_arrow(col, row - 1), state.v_arrow(col, row))
                assert vertex_arrows(kind, row_half(row)) == arrows


def test_row_halves():
    """ Positive horizontal arrows point towards the reflecting end on lower rows and away from it on upper rows."""

    assert vertex_arrows(VertexKind.A_PLUS, RowHalf.LOWER)[:2] == (Arrow.LEFT, Arrow.LEFT)
    assert vertex_arrows(VertexKind.A_PLUS, RowHalf.UPPER)[:2] == (Arrow.RIGHT, Arrow.RIGHT)
    assert [row_half(row) for row in range(1, 5)] == [RowHalf.LOWER, RowHalf.UPPER] * 2

    for enum in (Arrow, VertexKind, TurnKind, RowHalf):
        assert enum.__doc__ and 'An enumeration' not in enum.__doc__

def test_orientation_spins():
    """ The k_+ state of the 2x1 lattice has c_+ below and b_+ above."""

    state = parse_state('+\nC\nB\n')

    assert orientation_spins(state, 1, 1) == (1, -1, -1, 1)
    assert orientation_spins(state, 2, 1) == (1, 1, -1, -1)
    assert classify_vertex(state, 1, 1) is VertexKind.C_PLUS
    assert classify_vertex(state, 2, 1) is VertexKind.B_PLUS
    assert row_half(1) is RowHalf.LOWER

    with pytest.raises(DomainError):
        orientation_spins(state, 3, 1)


def test_state_stats():
    """ Unit test for the state_stats function."""

    stats = state_stats(parse_state('-\nB\nc\n'))

    assert stats.south[VertexKind.B_PLUS] == 1
    assert stats.north[VertexKind.C_MINUS] == 1
    assert stats.nu(VertexKind.C_PLUS) == 0
    assert stats.nu(TurnKind.K_MINUS) == 1


def test_broken_ice_rule():
    """ Flipping one inner arrow breaks the ice rule at both of its vertices."""

    state = parse_state('+\nC\nB\n')
    broken = state.with_v_arrow(1, 1, Arrow.UP)

    rules = sorted(violation.rule for violation in validate_state(broken))
    assert rules == ['ice', 'ice']

    with pytest.raises(IceRuleViolation):
        classify_vertex(broken, 1, 1)


def test_forbidden_turn():
    """ Both turn arrows pointing left is not a turn."""

    state = parse_state('+\nC\nB\n').with_h_arrow(2, 0, Arrow.LEFT)

    with pytest.raises(ForbiddenTurn):
        turn_kind(state, 1)
    assert 'turn' in [violation.rule for violation in validate_state(state)]


def test_boundary_violations():
    """ Letters that agree on shared edges can still break the domain-wall boundary."""

    state = parse_state('+\nC\nC\n')

    sites = {violation.site for violation in validate_state(state) if violation.rule == 'dwbc'}
    assert sites == {'top(1)', 'right(2)'}

    state = parse_state('+\nA\nA\n')

    assert [violation.rule for violation in validate_state(state)] == ['dwbc', 'dwbc']


@pytest.mark.parametrize('text, line, column', [
    ('', 1, 1),
    ('+\nX\n', 2, 1),
    ('?\nC\nB\n', 1, 1),
    ('+\nB\nB\n', 2, 1),
    ('+\nC\n', 3, 1),
    ('+\nCB\nB\n', 3, 2),
])
def test_parse_state_errors(text, line, column):
    """ Malformed state text is reported with its position."""

    with pytest.raises(ParseError) as excinfo:
        parse_state(text)

    assert (excinfo.value.line, excinfo.value.column) == (line, column)


def test_prefix_too_long():
    """ A shard prefix cannot cover more than the free edges of a column."""

    with pytest.raises(DomainError):
        list(enumerate_states(LatticeSize(1, 1), prefix=(Arrow.UP, Arrow.UP)))


def test_sharded_enumeration():
    """ Sharded enumeration returns the same states in the same order."""

    size = LatticeSize(3, 2)

    assert len(shard_prefixes(size)) == 4
    assert list(enumerate_states_sharded(size, workers=1)) == list(all_states(size))
    assert list(enumerate_states_sharded(size, workers=2, depth=3)) == list(all_states(size))
