"""Lines and planes, exact and numeric."""

import random
from fractions import Fraction

import numpy as np
import pytest

from cubiclines.errors import DegenerateLine, DimensionMismatch
from cubiclines.field import OMEGA, QOmega
from cubiclines.lines import Line, NumericLine, Plane, dedup_lines


def rand_vec(rng, n):
    return [QOmega(rng.randint(-5, 5), rng.randint(-2, 2)) for _ in range(n)]


def combine(u, v, a, b):
    return [a * x + b * y for x, y in zip(u, v)]


def test_canonical_rows_independent_of_spanning_set():
    rng = random.Random(31)
    trials = 0
    while trials < 40:
        p, q = rand_vec(rng, 5), rand_vec(rng, 5)
        try:
            base = Line.through(p, q)
        except DegenerateLine:
            continue
        alt = Line.through(
            combine(p, q, QOmega(2), QOmega(1, 1)),
            combine(p, q, QOmega(0, 1), QOmega(-3)),
        )
        assert alt == base
        assert alt.rows == base.rows
        assert hash(alt) == hash(base)
        trials += 1


def test_membership_and_points():
    line = Line.through([1, 0, 0, 0], [0, 1, 0, 0])
    assert line.contains_point([2, -5, 0, 0])
    assert not line.contains_point([1, 0, 1, 0])
    pt = line.point(QOmega(1, 1), QOmega(3))
    assert line.contains_point(pt)


def test_degenerate_spans_rejected():
    with pytest.raises(DegenerateLine):
        Line.through([1, 2, 3], [2, 4, 6])
    with pytest.raises(DegenerateLine):
        Plane([[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0]])


def test_plucker_coordinates_satisfy_quadric():
    """p01 p23 - p02 p13 + p03 p12 = 0 for every line in P^3."""
    rng = random.Random(32)
    done = 0
    while done < 30:
        try:
            line = Line.through(rand_vec(rng, 4), rand_vec(rng, 4))
        except DegenerateLine:
            continue
        p = line.plucker()
        assert len(p) == 6
        rel = p[0] * p[5] - p[1] * p[4] + p[2] * p[3]
        assert not rel
        done += 1


def test_plane_contains_its_lines():
    plane = Plane.through([1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0])
    inner = Line.through([1, 1, 0, 0, 0], [0, 1, -1, 0, 0])
    outer = Line.through([1, 0, 0, 1, 0], [0, 1, 0, 0, 0])
    assert plane.contains_line(inner)
    assert not plane.contains_line(outer)
    assert plane.contains_point([2, OMEGA, -1, 0, 0])


def test_exact_json_roundtrip():
    rng = random.Random(33)
    line = Line.through(
        [Fraction(1, 2), 1, 0, OMEGA], [0, Fraction(-2, 3), 1, 1]
    )
    assert Line.from_json(line.to_json()) == line
    plane = Plane.through([1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, OMEGA])
    assert Plane.from_json(plane.to_json()) == plane


def test_numeric_line_is_basis_free():
    rng = np.random.default_rng(34)
    p = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    q = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    a = NumericLine.from_points(p, q)
    b = NumericLine.from_points(2.5j * q, p - 0.3 * q)
    assert a.chordal_distance(b) < 1e-12
    assert a.contains_point(0.7 * p + 1.9j * q)
    assert not a.contains_point(rng.standard_normal(6))


def test_numeric_exact_agreement():
    line = Line.through([1, -1, 0, 0, 0, 0], [0, 0, 1, -1, 0, 0])
    nl = line.to_numeric()
    assert nl.point_gap([1.0, -1.0, 2.0, -2.0, 0.0, 0.0]) < 1e-14
    assert nl.point_gap([1.0, 1.0, 0.0, 0.0, 0.0, 0.0]) > 0.5


def test_numeric_degenerate_rejected():
    with pytest.raises(DegenerateLine):
        NumericLine.from_points([1.0, 2.0, 0.0], [2.0, 4.0, 1e-14])
    with pytest.raises(DimensionMismatch):
        NumericLine(np.ones((3, 4)))


def test_chordal_distance_separates():
    a = NumericLine.from_points([1, 0, 0, 0], [0, 1, 0, 0])
    c = NumericLine.from_points([0, 0, 1, 0], [0, 0, 0, 1])
    assert a.chordal_distance(c) > 0.9
    assert a.chordal_distance(a) < 1e-12


def test_dedup_lines_clusters_perturbations():
    rng = np.random.default_rng(35)
    originals = []
    noisy = []
    for _ in range(8):
        p = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        q = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        originals.append(NumericLine.from_points(p, q))
        for _ in range(3):
            dp = 1e-9 * rng.standard_normal(5)
            dq = 1e-9 * rng.standard_normal(5)
            noisy.append(NumericLine.from_points(p + dp, q + dq))
    kept = dedup_lines(noisy, tol=1e-6)
    assert len(kept) == 8
    for orig in originals:
        assert min(orig.chordal_distance(k) for k in kept) < 1e-7
