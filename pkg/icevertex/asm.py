""" Matrices in bijection with the lattice states, their validation and enumeration. """

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

from dataclasses import dataclass

from icevertex.errors import DomainError, InconsistentMatrix, ParseError, SizeError
from icevertex.lattice import Arrow, LatticeSize, LatticeState, RowHalf, TurnKind, VertexKind, Violation
from icevertex.lattice import row_half, state_kinds, validate_state

logger = logging.getLogger(__name__)

_ENTRY_OF_KIND = {
    RowHalf.UPPER: {VertexKind.C_MINUS: 1, VertexKind.C_PLUS: -1},
    RowHalf.LOWER: {VertexKind.C_PLUS: 1, VertexKind.C_MINUS: -1},
}
_TOKENS = {'-1': -1, '0': 0, '1': 1}


@dataclass(frozen=True)
class AsmMatrix:
    """
    A 2n x m matrix over {-1, 0, 1} in correspondence with the lattice states.

    Row 1 is the top row; rows 2i-1 and 2i form double row i counted from the
    top, the first of them being the upper half.
    """
    size: LatticeSize
    entries: tuple

    def __post_init__(self):
        entries = tuple(tuple(int(value) for value in row) for row in self.entries)
        object.__setattr__(self, 'entries', entries)

        if len(entries) != self.size.rows or any(len(row) != self.size.m for row in entries):
            raise SizeError(f'matrix entries must form a {self.size.rows}x{self.size.m} grid')
        if any(value not in (-1, 0, 1) for row in entries for value in row):
            raise DomainError('matrix entries must be -1, 0 or 1')

    def column(self, col):
        """ Entries of column ``col`` (1-based), top first. """
        return tuple(row[col - 1] for row in self.entries)


def _lattice_row(size, matrix_row):
    return size.rows + 1 - matrix_row


def _partial_sums(values):
    total = 0
    for value in values:
        total += value
        yield total


def validate_matrix(mat):
    """
    Checks the column, row and double-row constraints of a matrix.

    Returns
    -------
    violations : list of :obj:`Violation`
        Empty if the matrix is valid.
    """
    violations = []

    for col in range(1, mat.size.m + 1):
        entries = mat.column(col)
        if any(partial not in (0, 1) for partial in _partial_sums(entries)):
            violations.append(Violation(f'column({col})', 'column', 'nonzero entries must alternate starting with 1'))
        elif sum(entries) != 1:
            violations.append(Violation(f'column({col})', 'column', f'column sums to {sum(entries)}, expected 1'))

    for r, row in enumerate(mat.entries, start=1):
        if any(partial not in (0, 1) for partial in _partial_sums(reversed(row))):
            violations.append(Violation(f'row({r})', 'row', 'nonzero entries must alternate ending with 1'))

    for i in range(1, mat.size.n + 1):
        total = sum(mat.entries[2 * i - 2]) + sum(mat.entries[2 * i - 1])
        if total not in (0, 1):
            violations.append(Violation(f'double-row({i})', 'double-row',
                                        f'double row sums to {total}, expected 0 or 1'))

    return violations


def state_to_matrix(state):
    """
    Maps a valid state to its matrix: c vertices become +1 or -1 and all others 0.

    On upper rows c_- gives 1 and c_+ gives -1; on lower rows c_+ gives 1 and c_- gives -1.
    """
    size = state.size
    kinds = state_kinds(state)
    entries = []

    for matrix_row in range(1, size.rows + 1):
        row = _lattice_row(size, matrix_row)
        table = _ENTRY_OF_KIND[row_half(row)]
        entries.append([table.get(kind, 0) for kind in kinds[row - 1]])

    return AsmMatrix(size, entries)


def _flip(arrow):
    return {Arrow.UP: Arrow.DOWN, Arrow.DOWN: Arrow.UP, Arrow.LEFT: Arrow.RIGHT, Arrow.RIGHT: Arrow.LEFT}[arrow]


def matrix_to_state(mat):
    """
    Reconstructs the state of a valid matrix.

    Vertical arrows start pointing up at the bottom boundary and horizontal arrows
    start pointing right at the right boundary; both flip at every nonzero entry.

    Raises
    ------
    InconsistentMatrix
        If the reconstruction is not a valid state mapping back to ``mat``.
    """
    size = mat.size
    rows, m = size.rows, size.m

    h_arrows = [[None] * m + [Arrow.RIGHT] for _ in range(rows)]
    v_arrows = [[Arrow.UP] + [None] * rows for _ in range(m)]

    for row in range(1, rows + 1):
        entries = mat.entries[_lattice_row(size, row) - 1]
        for col in range(m, 0, -1):
            arrow = h_arrows[row - 1][col]
            h_arrows[row - 1][col - 1] = _flip(arrow) if entries[col - 1] else arrow
        for col in range(1, m + 1):
            arrow = v_arrows[col - 1][row - 1]
            v_arrows[col - 1][row] = _flip(arrow) if entries[col - 1] else arrow

    state = LatticeState(size, h_arrows, v_arrows)

    violations = validate_state(state)
    if violations:
        logger.error('matrix propagates to an invalid state: %s', violations[0])
        raise InconsistentMatrix(f'{len(violations)} violations, first: {violations[0].message} '
                                 f'at {violations[0].site}')
    if state_to_matrix(state) != mat:
        raise InconsistentMatrix('reconstructed state does not map back to the matrix')

    return state


def matrix_turns(mat):
    """
    Turn kinds read from the matrix, bottom double row first: a lower row summing
    to 1 gives k_+, an upper row summing to 1 gives k_-, otherwise k_c.
    """
    turns = []

    for i in range(mat.size.n, 0, -1):
        upper, lower = mat.entries[2 * i - 2], mat.entries[2 * i - 1]
        if sum(lower) == 1:
            turns.append(TurnKind.K_PLUS)
        elif sum(upper) == 1:
            turns.append(TurnKind.K_MINUS)
        else:
            turns.append(TurnKind.K_CREATE)

    return tuple(turns)


def _search(size):
    rows, m = size.rows, size.m
    grid = [[0] * m for _ in range(rows)]
    columns = [0] * m

    def place(r, c, row_sum, double_sum):
        if c < 0:
            double_sum += row_sum
            if double_sum > 1:
                return
            if r == rows - 1:
                if all(total == 1 for total in columns):
                    yield AsmMatrix(size, grid)
                return
            yield from place(r + 1, m - 1, 0, double_sum if r % 2 == 0 else 0)
            return

        for value in (0, 1, -1):
            if row_sum + value not in (0, 1) or columns[c] + value not in (0, 1):
                continue
            grid[r][c] = value
            columns[c] += value
            yield from place(r, c - 1, row_sum + value, double_sum)
            columns[c] -= value
        grid[r][c] = 0

    yield from place(0, m - 1, 0, 0)


def enumerate_matrices(size):
    """
    Enumerates every valid matrix of a size exactly once.

    Entries are chosen row by row from the top, right to left within each row,
    keeping every column prefix sum and every row suffix sum in {0, 1}.

    Returns
    -------
    matrices : iterator of :obj:`AsmMatrix`
        Matrices in lexicographic order of their serialized text.
    """
    matrices = sorted(_search(size), key=serialize_matrix)
    logger.debug('enumerated %d matrices of size %s', len(matrices), size)

    return iter(matrices)


def serialize_matrix(mat):
    """ Writes 2n lines of m space-separated entries, top row first. """
    return '\n'.join(' '.join(str(value) for value in row) for row in mat.entries) + '\n'


def parse_matrix(text):
    """
    Reads a matrix written by :func:`serialize_matrix`.

    Raises
    ------
    ParseError
        With the line and column of the first malformed token.
    """
    lines = text.split('\n')
    if lines and lines[-1] == '':
        lines.pop()
    if not lines:
        raise ParseError('empty matrix text', 1, 1)

    entries = []
    for number, line in enumerate(lines, start=1):
        row = []
        column = 1
        for token in line.split(' ') if line else []:
            if token not in _TOKENS:
                raise ParseError(f'unknown matrix entry {token!r}', number, column)
            row.append(_TOKENS[token])
            column += len(token) + 1
        if entries and len(row) != len(entries[0]):
            raise ParseError(f'expected {len(entries[0])} entries, found {len(row)}', number, 1)
        entries.append(row)

    if len(entries) % 2:
        raise ParseError('a matrix has an even number of rows', len(lines), 1)

    try:
        size = LatticeSize(len(entries) // 2, len(entries[0]))
    except SizeError as err:
        raise ParseError(str(err), 1, 1) from err

    return AsmMatrix(size, entries)
