""" Lattice geometry, states, validation and exhaustive state enumeration. """

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

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from itertools import chain, product

from icevertex.errors import DomainError, ForbiddenTurn, IceRuleViolation, ParseError, SizeError
from icevertex.utils import max_workers

logger = logging.getLogger(__name__)


class Arrow(Enum):
    """ Physical direction of the arrow on an edge. """
    UP = 'U'
    DOWN = 'D'
    LEFT = 'L'
    RIGHT = 'R'


class VertexKind(Enum):
    """ The six vertices allowed by the ice rule, valued by their letter in the text format. """
    A_PLUS = 'A'
    A_MINUS = 'a'
    B_PLUS = 'B'
    B_MINUS = 'b'
    C_PLUS = 'C'
    C_MINUS = 'c'


class TurnKind(Enum):
    """ Boundary configurations at the reflecting end, valued by their marker in the text format. """
    K_PLUS = '+'
    K_MINUS = '-'
    K_CREATE = '*'


class RowHalf(Enum):
    """ Half of a double row: the lower row is oriented towards the reflecting end, the upper row away from it. """
    LOWER = 'lower'
    UPPER = 'upper'


# Orientation-relative spins of each vertex kind: (h_in, h_out, v_in, v_out) on
# right-oriented (upper) rows, (bottom, top, right, left) on left-oriented (lower) rows.
VERTEX_SPINS = {
    VertexKind.A_PLUS: (1, 1, 1, 1),
    VertexKind.A_MINUS: (-1, -1, -1, -1),
    VertexKind.B_PLUS: (1, 1, -1, -1),
    VertexKind.B_MINUS: (-1, -1, 1, 1),
    VertexKind.C_PLUS: (1, -1, -1, 1),
    VertexKind.C_MINUS: (-1, 1, 1, -1),
}

# (lower row, upper row) arrows on the two edges touching the reflecting end
TURN_ARROWS = {
    TurnKind.K_PLUS: (Arrow.LEFT, Arrow.RIGHT),
    TurnKind.K_MINUS: (Arrow.RIGHT, Arrow.LEFT),
    TurnKind.K_CREATE: (Arrow.RIGHT, Arrow.RIGHT),
}

_KIND_OF_SPINS = {spins: kind for kind, spins in VERTEX_SPINS.items()}
_TURN_OF_ARROWS = {arrows: kind for kind, arrows in TURN_ARROWS.items()}
_LETTERS = {kind.value: kind for kind in VertexKind}
_MARKERS = {kind.value: kind for kind in TurnKind}


@dataclass(frozen=True)
class LatticeSize:
    """ Size of the U-turn lattice: n double rows and m vertical lines, with m <= n. """
    n: int
    m: int

    def __post_init__(self):
        for name in ('n', 'm'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise SizeError(f'{name} must be an integer, got {value!r}')
        if self.n < 1:
            raise SizeError(f'n must be positive, got {self.n}')
        if self.m < 0:
            raise SizeError(f'm must be non-negative, got {self.m}')
        if self.m > self.n:
            raise SizeError(f'm={self.m} exceeds n={self.n}: the ice rule needs n >= m')

    @property
    def rows(self):
        """ Number of lattice rows, 2n. """
        return 2 * self.n


@dataclass(frozen=True)
class Violation:
    """ A broken lattice or matrix constraint. """
    site: str
    rule: str
    message: str


@dataclass(frozen=True)
class LatticeState:
    """
    Arrow assignment on every edge of the U-turn lattice.

    Rows are counted from the bottom starting at 1; rows 2i-1 (lower) and 2i
    (upper) form double row i. Columns are counted from the left starting at 1.

    Attributes
    ----------
    size : :obj:`LatticeSize`
        Lattice dimensions.
    h_arrows : tuple of tuples of :obj:`Arrow`
        2n rows of m+1 horizontal arrows. Gap 0 touches the reflecting end and
        gap m is the right boundary.
    v_arrows : tuple of tuples of :obj:`Arrow`
        m columns of 2n+1 vertical arrows. Gap 0 is the bottom boundary and gap 2n
        the top boundary.
    """
    size: LatticeSize
    h_arrows: tuple
    v_arrows: tuple

    def __post_init__(self):
        h_arrows = tuple(tuple(row) for row in self.h_arrows)
        v_arrows = tuple(tuple(column) for column in self.v_arrows)
        object.__setattr__(self, 'h_arrows', h_arrows)
        object.__setattr__(self, 'v_arrows', v_arrows)

        rows, m = self.size.rows, self.size.m
        if len(h_arrows) != rows or any(len(row) != m + 1 for row in h_arrows):
            raise SizeError(f'horizontal arrows must form a {rows}x{m + 1} grid')
        if len(v_arrows) != m or any(len(column) != rows + 1 for column in v_arrows):
            raise SizeError(f'vertical arrows must form a {m}x{rows + 1} grid')
        if any(arrow not in (Arrow.LEFT, Arrow.RIGHT) for row in h_arrows for arrow in row):
            raise DomainError('horizontal edges carry LEFT or RIGHT arrows')
        if any(arrow not in (Arrow.UP, Arrow.DOWN) for column in v_arrows for arrow in column):
            raise DomainError('vertical edges carry UP or DOWN arrows')

    def h_arrow(self, row, gap):
        """ Arrow on the horizontal edge of ``row`` at ``gap``. """
        return self.h_arrows[row - 1][gap]

    def v_arrow(self, col, gap):
        """ Arrow on the vertical edge of ``col`` at ``gap``. """
        return self.v_arrows[col - 1][gap]

    def with_h_arrow(self, row, gap, arrow):
        """ Returns a copy with one horizontal arrow replaced. """
        h_arrows = [list(arrows) for arrows in self.h_arrows]
        h_arrows[row - 1][gap] = arrow
        return replace(self, h_arrows=h_arrows)

    def with_v_arrow(self, col, gap, arrow):
        """ Returns a copy with one vertical arrow replaced. """
        v_arrows = [list(arrows) for arrows in self.v_arrows]
        v_arrows[col - 1][gap] = arrow
        return replace(self, v_arrows=v_arrows)


@dataclass(frozen=True)
class StateStats:
    """
    Occurrence counts of vertex and turn kinds in one state.

    Attributes
    ----------
    north : dict
        Vertex counts on the upper rows of the double rows.
    south : dict
        Vertex counts on the lower rows of the double rows.
    turns : dict
        Turn counts.
    """
    north: dict
    south: dict
    turns: dict

    def nu(self, kind):
        """ Total number of occurrences of a vertex or turn kind. """
        if isinstance(kind, TurnKind):
            return self.turns[kind]
        return self.north[kind] + self.south[kind]


def row_half(row):
    """ Odd rows are the lower halves of their double rows, even rows the upper halves. """
    return RowHalf.LOWER if row % 2 == 1 else RowHalf.UPPER


def _check_site(state, row, col):
    if not 1 <= row <= state.size.rows or not 1 <= col <= state.size.m:
        raise DomainError(f'vertex ({row}, {col}) lies outside a {state.size.rows}x{state.size.m} lattice')


def _incident_arrows(state, row, col):
    left = state.h_arrows[row - 1][col - 1]
    right = state.h_arrows[row - 1][col]
    bottom = state.v_arrows[col - 1][row - 1]
    top = state.v_arrows[col - 1][row]
    return left, right, bottom, top


def _inward_count(state, row, col):
    left, right, bottom, top = _incident_arrows(state, row, col)
    return (left is Arrow.RIGHT) + (right is Arrow.LEFT) + (bottom is Arrow.UP) + (top is Arrow.DOWN)


def orientation_spins(state, row, col):
    """
    Converts the four arrows around a vertex into spins relative to the line
    orientations.

    Vertical lines point up, upper rows point right and lower rows, which run
    back towards the reflecting end, point left.

    Parameters
    ----------
    state : :obj:`LatticeState`
        Lattice state.
    row : int
        Row index, 1 to 2n from the bottom.
    col : int
        Column index, 1 to m from the left.

    Returns
    -------
    spins : tuple of int
        (h_in, h_out, v_in, v_out) on upper rows and (bottom, top, right, left) on
        lower rows, each +1 or -1.
    """
    _check_site(state, row, col)
    left, right, bottom, top = _incident_arrows(state, row, col)

    s_bottom = 1 if bottom is Arrow.UP else -1
    s_top = 1 if top is Arrow.UP else -1

    if row_half(row) is RowHalf.UPPER:
        return (1 if left is Arrow.RIGHT else -1, 1 if right is Arrow.RIGHT else -1, s_bottom, s_top)

    return (s_bottom, s_top, 1 if right is Arrow.LEFT else -1, 1 if left is Arrow.LEFT else -1)


def vertex_arrows(kind, half):
    """ Physical (left, right, bottom, top) arrows of a vertex kind on a row half. """
    spins = VERTEX_SPINS[kind]

    if half is RowHalf.UPPER:
        s_left, s_right, s_bottom, s_top = spins
        positive = Arrow.RIGHT
    else:
        s_bottom, s_top, s_right, s_left = spins
        positive = Arrow.LEFT
    negative = Arrow.LEFT if positive is Arrow.RIGHT else Arrow.RIGHT

    return (positive if s_left > 0 else negative,
            positive if s_right > 0 else negative,
            Arrow.UP if s_bottom > 0 else Arrow.DOWN,
            Arrow.UP if s_top > 0 else Arrow.DOWN)


def classify_vertex(state, row, col):
    """
    Classifies the vertex at (row, col).

    Returns
    -------
    kind : :obj:`VertexKind`

    Raises
    ------
    IceRuleViolation
        If the arrow pattern is not one of the six admissible ones.
    """
    spins = orientation_spins(state, row, col)

    try:
        return _KIND_OF_SPINS[spins]
    except KeyError:
        raise IceRuleViolation(f'vertex ({row}, {col}) has {_inward_count(state, row, col)} '
                               'inward arrows') from None


def turn_kind(state, double_row):
    """ Classifies the turn of a double row from its two arrows at the reflecting end. """
    if not 1 <= double_row <= state.size.n:
        raise DomainError(f'double row {double_row} outside 1..{state.size.n}')

    arrows = (state.h_arrows[2 * double_row - 2][0], state.h_arrows[2 * double_row - 1][0])

    try:
        return _TURN_OF_ARROWS[arrows]
    except KeyError:
        raise ForbiddenTurn(f'double row {double_row} has both turn arrows pointing left') from None


@lru_cache(maxsize=65536)
def state_kinds(state):
    """ Vertex kinds of a state as a tuple of rows (bottom first) of column kinds. """
    return tuple(tuple(classify_vertex(state, row, col) for col in range(1, state.size.m + 1))
                 for row in range(1, state.size.rows + 1))


@lru_cache(maxsize=65536)
def state_turns(state):
    """ Turn kinds of a state, bottom double row first. """
    return tuple(turn_kind(state, i) for i in range(1, state.size.n + 1))


def validate_state(state):
    """
    Checks the ice rule, the domain-wall boundary, turn admissibility and the
    number of creation turns.

    Parameters
    ----------
    state : :obj:`LatticeState`
        State to check.

    Returns
    -------
    violations : list of :obj:`Violation`
        Empty if the state is valid.
    """
    n, m = state.size.n, state.size.m
    violations = []

    for row in range(1, state.size.rows + 1):
        for col in range(1, m + 1):
            inward = _inward_count(state, row, col)
            if inward != 2:
                violations.append(Violation(f'vertex({row},{col})', 'ice',
                                            f'{inward} arrows point into the vertex'))

    for col in range(1, m + 1):
        if state.v_arrow(col, 0) is not Arrow.UP:
            violations.append(Violation(f'bottom({col})', 'dwbc', 'bottom boundary arrow must point up'))
        if state.v_arrow(col, state.size.rows) is not Arrow.DOWN:
            violations.append(Violation(f'top({col})', 'dwbc', 'top boundary arrow must point down'))

    for row in range(1, state.size.rows + 1):
        if state.h_arrow(row, m) is not Arrow.RIGHT:
            violations.append(Violation(f'right({row})', 'dwbc', 'right boundary arrow must point right'))

    creations = 0
    for i in range(1, n + 1):
        arrows = (state.h_arrow(2 * i - 1, 0), state.h_arrow(2 * i, 0))
        if arrows not in _TURN_OF_ARROWS:
            violations.append(Violation(f'turn({i})', 'turn', 'both turn arrows point left'))
        elif _TURN_OF_ARROWS[arrows] is TurnKind.K_CREATE:
            creations += 1

    if creations != n - m:
        violations.append(Violation('turns', 'creation-count',
                                    f'{creations} creation turns, expected {n - m}'))

    return violations


def state_stats(state):
    """ Counts every vertex kind, split into upper (north) and lower (south) rows, and every turn kind. """
    north = Counter()
    south = Counter()

    for row, kinds in enumerate(state_kinds(state), start=1):
        (north if row_half(row) is RowHalf.UPPER else south).update(kinds)

    turns = Counter(state_turns(state))

    return StateStats(north={kind: north[kind] for kind in VertexKind},
                      south={kind: south[kind] for kind in VertexKind},
                      turns={kind: turns[kind] for kind in TurnKind})


def serialize_state(state):
    """
    Writes a state in the text format: one block per double row, bottom first,
    made of the turn marker and, when m > 0, the lower and upper rows of vertex
    letters.
    """
    kinds = state_kinds(state)
    lines = []

    for i, turn in enumerate(state_turns(state)):
        lines.append(turn.value)
        if state.size.m:
            lines.append(''.join(kind.value for kind in kinds[2 * i]))
            lines.append(''.join(kind.value for kind in kinds[2 * i + 1]))

    return '\n'.join(lines) + '\n'


def parse_state(text):
    """
    Reads a state written by :func:`serialize_state`.

    Only the text is checked: letters must agree on every shared edge, so the
    ice rule holds, but boundary arrows and the number of creation turns are
    left to :func:`validate_state`.

    Raises
    ------
    ParseError
        With the line and column of the first malformed character.
    """
    lines = text.split('\n')
    if lines and lines[-1] == '':
        lines.pop()
    if not lines:
        raise ParseError('empty state text', 1, 1)

    m = 0 if len(lines) == 1 or lines[1] in _MARKERS else len(lines[1])
    if len(lines) > 1 and m == 0 and lines[1] not in _MARKERS:
        raise ParseError('empty vertex row', 2, 1)
    block = 3 if m else 1

    double_rows = -(-len(lines) // block)
    h_arrows = [[None] * (m + 1) for _ in range(2 * double_rows)]
    v_arrows = [[None] * (len(h_arrows) + 1) for _ in range(m)]

    def assign(grid, i, j, arrow, line, column):
        if grid[i][j] is None:
            grid[i][j] = arrow
        elif grid[i][j] is not arrow:
            raise ParseError('arrow disagrees with a neighbouring vertex or turn', line, column)

    for base in range(0, len(lines), block):
        double_row = base // block
        marker = lines[base]
        if marker not in _MARKERS:
            raise ParseError(f'unknown turn marker {marker!r}', base + 1, 1)
        lower, upper = TURN_ARROWS[_MARKERS[marker]]
        assign(h_arrows, 2 * double_row, 0, lower, base + 1, 1)
        assign(h_arrows, 2 * double_row + 1, 0, upper, base + 1, 1)

        for offset in range(1, block):
            line = base + offset
            row = 2 * double_row + offset
            if line >= len(lines):
                raise ParseError('missing vertex row', line + 1, 1)
            for col, letter in enumerate(lines[line], start=1):
                if letter not in _LETTERS:
                    raise ParseError(f'unknown vertex letter {letter!r}', line + 1, col)
            if len(lines[line]) != m:
                raise ParseError(f'expected {m} vertex letters, found {len(lines[line])}',
                                 line + 1, min(len(lines[line]), m) + 1)
            for col, letter in enumerate(lines[line], start=1):
                left, right, bottom, top = vertex_arrows(_LETTERS[letter], row_half(row))
                assign(h_arrows, row - 1, col - 1, left, line + 1, col)
                assign(h_arrows, row - 1, col, right, line + 1, col)
                assign(v_arrows, col - 1, row - 1, bottom, line + 1, col)
                assign(v_arrows, col - 1, row, top, line + 1, col)

    try:
        size = LatticeSize(len(h_arrows) // 2, m)
    except SizeError as err:
        raise ParseError(str(err), 2, 1) from err

    return LatticeState(size, h_arrows, v_arrows)


def _column_fillings(right, prefix):
    """ Yields (vertical, left) arrow tuples of one column given its right-hand arrows.

    Arrows are booleans here: True is UP on vertical edges and RIGHT on horizontal ones.
    """
    rows = len(right)
    vertical = [True] + [None] * rows
    left = [None] * rows

    def extend(row):
        if row == rows:
            yield tuple(vertical), tuple(left)
            return

        if row == rows - 1:
            tops = (False,)
        elif row < len(prefix):
            tops = (prefix[row],)
        else:
            tops = (True, False)

        for top in tops:
            inward = vertical[row] + (not top) + (not right[row])
            # the left edge must supply the missing inward arrows, at most one
            if inward not in (1, 2):
                continue
            vertical[row + 1] = top
            left[row] = inward == 1
            yield from extend(row + 1)

    yield from extend(0)


def _turns_admissible(gap, creations):
    pairs = list(zip(gap[0::2], gap[1::2]))
    if not all(lower or upper for lower, upper in pairs):
        return False
    return sum(lower and upper for lower, upper in pairs) == creations


def _build_state(size, gaps, columns):
    h_arrows = [[Arrow.RIGHT if gaps[g][row] else Arrow.LEFT for g in range(size.m + 1)]
                for row in range(size.rows)]
    v_arrows = [[Arrow.UP if arrow else Arrow.DOWN for arrow in column] for column in columns]
    return LatticeState(size, h_arrows, v_arrows)


def _search(size, prefix):
    rows, m = size.rows, size.m
    creations = size.n - size.m
    gaps = [None] * m + [(True,) * rows]
    columns = [None] * m

    def place(col):
        if col == 0:
            if _turns_admissible(gaps[0], creations):
                yield _build_state(size, gaps, columns)
            return
        for vertical, left in _column_fillings(gaps[col], prefix if col == m else ()):
            columns[col - 1] = vertical
            gaps[col - 1] = left
            yield from place(col - 1)

    yield from place(m)


def _check_prefix(size, prefix):
    prefix = tuple(bool(arrow is Arrow.UP or arrow is True) for arrow in prefix)
    limit = size.rows - 1 if size.m else 0
    if len(prefix) > limit:
        raise DomainError(f'prefix of length {len(prefix)} exceeds the {limit} free edges of the first column')
    return prefix


def enumerate_states(size, prefix=()):
    """
    Enumerates every valid state of the lattice exactly once.

    The search fills columns from the right boundary towards the reflecting end,
    choosing vertical arrows bottom to top and deducing each left arrow from the
    ice rule.

    Parameters
    ----------
    size : :obj:`LatticeSize`
        Lattice dimensions.
    prefix : tuple of :obj:`Arrow`, optional
        Fixes the lowest inner vertical arrows of the rightmost column, bottom
        first. Used to shard the search.

    Returns
    -------
    states : iterator of :obj:`LatticeState`
        States in lexicographic order of their serialized text.
    """
    prefix = _check_prefix(size, prefix)
    states = sorted(_search(size, prefix), key=serialize_state)
    logger.debug('enumerated %d states of size %s with prefix %s', len(states), size, prefix)

    return iter(states)


def shard_prefixes(size, depth=2):
    """ All first-column prefixes of a given depth; together they cover the whole search. """
    if size.m == 0:
        return [()]

    depth = min(depth, size.rows - 1)
    return [tuple(Arrow.UP if up else Arrow.DOWN for up in bits) for bits in product((True, False), repeat=depth)]


def _shard_states(size, prefix):
    return list(enumerate_states(size, prefix))


def enumerate_states_sharded(size, workers=None, depth=2):
    """
    Runs :func:`enumerate_states` on every shard and merges the results in the
    same deterministic order.

    Parameters
    ----------
    size : :obj:`LatticeSize`
        Lattice dimensions.
    workers : int, optional
        Number of worker processes; defaults to ICEVERTEX_THREADS.
    depth : int
        Prefix length used to split the search.
    """
    workers = max_workers() if workers is None else workers
    prefixes = shard_prefixes(size, depth)

    if workers > 1 and len(prefixes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(_shard_states, [size] * len(prefixes), prefixes))
    else:
        shards = [_shard_states(size, prefix) for prefix in prefixes]

    return iter(sorted(chain.from_iterable(shards), key=serialize_state))


@lru_cache(maxsize=32)
def all_states(size):
    """ Cached tuple of every state of a size, in enumeration order. """
    return tuple(enumerate_states(size))
