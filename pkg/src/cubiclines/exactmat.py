"""Exact linear algebra over Q(w).

Small dense matrices with QOmega entries: reduced row echelon form,
rank, kernel bases, and linear solves.  Pivoting is deterministic
(first nonzero entry scanning top-to-bottom), so canonical forms built
on `rref` are reproducible across runs.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .errors import DimensionMismatch
from .field import QOmega

Row = List[QOmega]


class ExactMatrix:
    """A dense matrix over Q(w).  Rows are lists of QOmega."""

    def __init__(self, rows: Sequence[Sequence]):
        self.rows: List[Row] = [[QOmega.coerce(v) for v in row] for row in rows]
        if self.rows:
            width = len(self.rows[0])
            for row in self.rows:
                if len(row) != width:
                    raise DimensionMismatch("ragged rows")
        self.n_rows = len(self.rows)
        self.n_cols = len(self.rows[0]) if self.rows else 0

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            [[self.rows[i][j] for i in range(self.n_rows)] for j in range(self.n_cols)]
        )

    def rref(self) -> Tuple[List[Row], List[int]]:
        """Reduced row echelon form and the pivot column indices."""
        rows = [list(r) for r in self.rows]
        pivots: List[int] = []
        r = 0
        for c in range(self.n_cols):
            pivot_row = None
            for i in range(r, len(rows)):
                if rows[i][c]:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            inv = rows[r][c].inverse()
            rows[r] = [v * inv for v in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c]:
                    factor = rows[i][c]
                    rows[i] = [vi - factor * vr for vi, vr in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        return rows, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> List[Row]:
        """Basis of the right null space, one vector per free column.

        The vector for free column c has a 1 in position c, zeros in the
        other free positions, and pivot entries read off the rref.
        """
        rows, pivots = self.rref()
        pivot_set = set(pivots)
        basis: List[Row] = []
        for c in range(self.n_cols):
            if c in pivot_set:
                continue
            vec = [QOmega.zero()] * self.n_cols
            vec[c] = QOmega.one()
            for r, pc in enumerate(pivots):
                vec[pc] = -rows[r][c]
            basis.append(vec)
        return basis

    def solve(self, rhs: Sequence) -> Optional[Row]:
        """One solution of A x = rhs with free variables set to 0, or None."""
        b = [QOmega.coerce(v) for v in rhs]
        if len(b) != self.n_rows:
            raise DimensionMismatch("rhs length != row count")
        augmented = ExactMatrix(
            [list(row) + [b[i]] for i, row in enumerate(self.rows)]
        )
        rows, pivots = augmented.rref()
        if self.n_cols in pivots:
            return None  # inconsistent: pivot in the rhs column
        x = [QOmega.zero()] * self.n_cols
        for r, pc in enumerate(pivots):
            x[pc] = rows[r][self.n_cols]
        return x

    def apply(self, vec: Sequence) -> Row:
        v = [QOmega.coerce(u) for u in vec]
        if len(v) != self.n_cols:
            raise DimensionMismatch("vector length != column count")
        return [
            sum((row[j] * v[j] for j in range(self.n_cols)), QOmega.zero())
            for row in self.rows
        ]


def rank_from_minors(rows: Sequence[Sequence]) -> int:
    """Rank by exhaustive minor expansion — an independent cross-check.

    Exponential in matrix size; intended only for the small matrices in
    tests.
    """
    mat = [[QOmega.coerce(v) for v in row] for row in rows]
    if not mat or not mat[0]:
        return 0
    from itertools import combinations

    n_rows, n_cols = len(mat), len(mat[0])
    for size in range(min(n_rows, n_cols), 0, -1):
        for ri in combinations(range(n_rows), size):
            for ci in combinations(range(n_cols), size):
                sub = [[mat[i][j] for j in ci] for i in ri]
                if _det(sub):
                    return size
    return 0


def _det(mat: List[Row]) -> QOmega:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = QOmega.zero()
    sign = QOmega.one()
    for j in range(n):
        if mat[0][j]:
            minor = [[row[k] for k in range(n) if k != j] for row in mat[1:]]
            total = total + sign * mat[0][j] * _det(minor)
        sign = -sign
    return total
