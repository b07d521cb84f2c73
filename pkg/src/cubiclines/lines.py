"""Lines and planes in projective space, exact and numeric.

Exact subspaces are stored as canonical reduced-row-echelon bases over
Q(w), so two spans of the same subspace compare equal and serialize
identically.  Numeric lines carry a unit Pluecker vector; the chordal
distance between those vectors is the metric used everywhere for
deduplication and for matching numeric output against exact expectations.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DegenerateLine, DimensionMismatch
from .exactmat import ExactMatrix
from .field import QOmega


def _canonical_rows(rows: Sequence[Sequence], expected_rank: int) -> List[List[QOmega]]:
    mat = ExactMatrix(rows)
    rref, pivots = mat.rref()
    if len(pivots) != expected_rank:
        raise DegenerateLine(
            f"spanning set has rank {len(pivots)}, expected {expected_rank}"
        )
    return [rref[i] for i in range(expected_rank)]


def _rows_to_json(rows: List[List[QOmega]]) -> dict:
    return {
        "rows": [[{"a": str(v.a), "b": str(v.b)} for v in row] for row in rows]
    }


def _rows_from_json(data: dict) -> List[List[QOmega]]:
    return [
        [QOmega(Fraction(cell["a"]), Fraction(cell["b"])) for cell in row]
        for row in data["rows"]
    ]


class Line:
    """A projective line, canonically presented by two rref basis rows."""

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = _canonical_rows(rows, 2)
        self.n_coords = len(self.rows[0])

    @classmethod
    def through(cls, p: Sequence, q: Sequence) -> "Line":
        return cls([p, q])

    def point(self, s, t) -> List[QOmega]:
        s, t = QOmega.coerce(s), QOmega.coerce(t)
        return [s * a + t * b for a, b in zip(self.rows[0], self.rows[1])]

    def contains_point(self, pt: Sequence) -> bool:
        return ExactMatrix(list(self.rows) + [list(pt)]).rank() == 2

    def plucker(self) -> Tuple[QOmega, ...]:
        """Pluecker coordinates p_ij (i < j), scaled so the first nonzero is 1."""
        x, y = self.rows
        coords = [
            x[i] * y[j] - x[j] * y[i]
            for i, j in combinations(range(self.n_coords), 2)
        ]
        for c in coords:
            if c:
                inv = c.inverse()
                return tuple(v * inv for v in coords)
        raise DegenerateLine("zero Pluecker vector")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Line):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(tuple(tuple(row) for row in self.rows))

    def __repr__(self) -> str:
        return f"Line({self.rows!r})"

    def to_json(self) -> dict:
        return _rows_to_json(self.rows)

    @classmethod
    def from_json(cls, data: dict) -> "Line":
        return cls(_rows_from_json(data))

    def to_numeric(self) -> "NumericLine":
        return NumericLine(
            np.array([[v.to_complex() for v in row] for row in self.rows])
        )


class Plane:
    """A projective plane, canonically presented by three rref basis rows."""

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = _canonical_rows(rows, 3)
        self.n_coords = len(self.rows[0])

    @classmethod
    def through(cls, p: Sequence, q: Sequence, r: Sequence) -> "Plane":
        return cls([p, q, r])

    def point(self, s, t, u) -> List[QOmega]:
        s, t, u = QOmega.coerce(s), QOmega.coerce(t), QOmega.coerce(u)
        return [
            s * a + t * b + u * c
            for a, b, c in zip(self.rows[0], self.rows[1], self.rows[2])
        ]

    def contains_point(self, pt: Sequence) -> bool:
        return ExactMatrix(list(self.rows) + [list(pt)]).rank() == 3

    def contains_line(self, line: Line) -> bool:
        return ExactMatrix(list(self.rows) + list(line.rows)).rank() == 3

    def __eq__(self, other) -> bool:
        if not isinstance(other, Plane):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(tuple(tuple(row) for row in self.rows))

    def __repr__(self) -> str:
        return f"Plane({self.rows!r})"

    def to_json(self) -> dict:
        return _rows_to_json(self.rows)

    @classmethod
    def from_json(cls, data: dict) -> "Plane":
        return cls(_rows_from_json(data))


class NumericLine:
    """A line over C carried as a 2 x (n+1) basis plus a unit Pluecker vector."""

    def __init__(self, rows):
        basis = np.asarray(rows, dtype=complex)
        if basis.ndim != 2 or basis.shape[0] != 2:
            raise DimensionMismatch("expected a 2 x (n+1) basis")
        q, r = np.linalg.qr(basis.T)
        if min(abs(r[0, 0]), abs(r[1, 1])) < 1e-12 * max(1.0, abs(r[0, 0])):
            raise DegenerateLine("basis rows are numerically dependent")
        self.basis = q.T  # rows orthonormal for the Hermitian inner product
        n = basis.shape[1]
        p = np.array(
            [
                self.basis[0, i] * self.basis[1, j]
                - self.basis[0, j] * self.basis[1, i]
                for i, j in combinations(range(n), 2)
            ]
        )
        self.plucker = p / np.linalg.norm(p)

    @classmethod
    def from_points(cls, p: Sequence[complex], q: Sequence[complex]) -> "NumericLine":
        return cls(np.array([p, q], dtype=complex))

    def chordal_distance(self, other: "NumericLine") -> float:
        """sin of the angle between the Pluecker directions; 0 iff equal lines."""
        overlap = abs(np.vdot(self.plucker, other.plucker))
        return float(np.sqrt(max(0.0, 1.0 - min(1.0, overlap) ** 2)))

    def point_gap(self, pt: Sequence[complex]) -> float:
        """Distance from the normalized point to the span of the basis."""
        v = np.asarray(pt, dtype=complex)
        v = v / np.linalg.norm(v)
        proj = self.basis.conj() @ v
        residual = v - self.basis.T @ proj
        return float(np.linalg.norm(residual))

    def contains_point(self, pt: Sequence[complex], tol: float = 1e-8) -> bool:
        return self.point_gap(pt) < tol

    def to_json(self) -> dict:
        return {
            "rows": [
                [{"re": float(c.real), "im": float(c.imag)} for c in row]
                for row in self.basis
            ]
        }


def dedup_lines(lines: Sequence[NumericLine], tol: float) -> List[NumericLine]:
    """Keep the first representative of each chordal-distance cluster."""
    kept: List[NumericLine] = []
    for line in lines:
        if all(line.chordal_distance(k) > tol for k in kept):
            kept.append(line)
    return kept
