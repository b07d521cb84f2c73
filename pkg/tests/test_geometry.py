"""Line classification, tangent pencils, residual lines.

The fixtures are small cubics whose plane sections were worked out by
hand, so every expected value below has a pencil-and-paper derivation.
"""

import random
from fractions import Fraction

import numpy as np
import pytest

from cubiclines.binaryform import BinaryForm
from cubiclines.errors import (
    FlexPoint,
    NotOnCubic,
    NotSecondType,
    NotTangent,
    PlaneInCubic,
    SingularPoint,
)
from cubiclines.field import OMEGA, QOmega
from cubiclines.fermat import fermat_form, fourfold_components, sample_ruling
from cubiclines.geometry import (
    LineType,
    certify_two_to_one,
    common_tangent_space,
    contains_line,
    eckardt_test,
    f_restrict_binary,
    gauss_ramification,
    gauss_restriction,
    gradient_quadrics,
    intersect_line_hypersurface,
    is_eckardt_point,
    line_type,
    line_type_numeric,
    residual_line,
    residual_line_numeric,
    restrict_to_line,
    second_type_pencil,
    tangent_planes_pencil,
    tangent_residual_point,
    tangent_spans,
    unique_tangent_plane,
)
from cubiclines.lines import Line, Plane
from cubiclines.multipoly import MultiPoly


def poly(n_vars, terms):
    return MultiPoly(n_vars, {tuple(e): QOmega.coerce(c) for e, c in terms})


FERMAT4 = fermat_form(4)

# a ruling of the fourfold joining two flexes of opposite blocks
RULING = Line.through([1, -1, 0, 0, 0, 0], [0, 0, 1, -1, 0, 0])

# x0^2 x2 + x1^2 x3 + x0 x4^2 + x4^3 + x5^3: contains the line
# span(e0, e1) with restricted gradient pencil (s^2, t^2) -> second type
MIXED = poly(
    6,
    [
        ((2, 0, 1, 0, 0, 0), 1),
        ((0, 2, 0, 1, 0, 0), 1),
        ((1, 0, 0, 0, 2, 0), 1),
        ((0, 0, 0, 0, 3, 0), 1),
        ((0, 0, 0, 0, 0, 3), 1),
    ],
)

# x0^2 x2 + x0 x1 x3 + x1^2 x4 + x5^3: the same line picks up
# gradients (s^2, s t, t^2), full rank -> first type
SPREAD = poly(
    6,
    [
        ((2, 0, 1, 0, 0, 0), 1),
        ((1, 1, 0, 1, 0, 0), 1),
        ((0, 2, 0, 0, 1, 0), 1),
        ((0, 0, 0, 0, 0, 3), 1),
    ],
)

E01 = Line.through([1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0])


def test_restriction_of_fermat_to_ruling_vanishes():
    assert contains_line(FERMAT4, RULING)
    assert restrict_to_line(FERMAT4, RULING).is_zero()
    off = Line.through([1, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0])
    assert not contains_line(FERMAT4, off)
    r = restrict_to_line(FERMAT4, off)
    assert r.coeffs == [QOmega(1), QOmega(0), QOmega(0), QOmega(1)]


def test_interpolated_restriction_matches_substitution():
    """Regression: the point-value fast path against full substitution."""
    rng = random.Random(99)
    for _ in range(40):
        n = rng.choice((4, 5, 6))
        terms = {}
        for _ in range(rng.randint(3, 9)):
            exps = [0] * n
            for _ in range(rng.choice((1, 2, 3))):
                exps[rng.randrange(n)] += 1
            terms[tuple(exps)] = QOmega(
                Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
                rng.randint(-2, 2),
            )
        f = MultiPoly(n, terms)
        if f.is_zero():
            continue
        p = [
            QOmega(Fraction(rng.randint(-4, 4), rng.randint(1, 3)), rng.randint(-2, 2))
            for _ in range(n)
        ]
        q = [QOmega(rng.randint(-4, 4), rng.randint(-2, 2)) for _ in range(n)]
        try:
            ln = Line.through(p, q)
        except Exception:
            continue
        g = f.restrict(ln.rows)
        d = f.degree()
        expected = [g.coefficient((d - k, k)) for k in range(d + 1)]
        assert restrict_to_line(f, ln).coeffs == expected
        assert f_restrict_binary(f, ln).coeffs == expected
        assert contains_line(f, ln) == g.is_zero()


def test_gradient_quadrics_of_ruling():
    quads = gradient_quadrics(FERMAT4, RULING)
    assert len(quads) == 6
    # partials 3 x_i^2 restricted: s^2 twice, t^2 twice, zero twice
    assert quads[0].coeffs == [QOmega(3), QOmega(0), QOmega(0)]
    assert quads[1].coeffs == [QOmega(3), QOmega(0), QOmega(0)]
    assert quads[2].coeffs == [QOmega(0), QOmega(0), QOmega(3)]
    assert quads[3].coeffs == [QOmega(0), QOmega(0), QOmega(3)]
    assert quads[4].is_zero() and quads[5].is_zero()


def test_line_types_on_fixtures():
    assert line_type(FERMAT4, RULING) is LineType.SECOND
    assert line_type(MIXED, E01) is LineType.SECOND
    assert line_type(SPREAD, E01) is LineType.FIRST
    with pytest.raises(NotOnCubic):
        line_type(FERMAT4, E01)


def test_tangent_spans_by_type():
    second = tangent_spans(FERMAT4, RULING)
    assert second.quotient_dim == 2
    assert len(second.solution_basis) == 4
    first = tangent_spans(SPREAD, E01)
    assert first.quotient_dim == 1
    plane = unique_tangent_plane(SPREAD, E01)
    # worked out by hand: span(e0, e1, e5)
    assert plane == Plane.through(
        [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 0, 0, 0, 1]
    )
    with pytest.raises(Exception):
        unique_tangent_plane(FERMAT4, RULING)  # a whole pencil is tangent


def test_common_tangent_space_contains_the_line():
    from cubiclines.exactmat import ExactMatrix

    for f, ln in ((FERMAT4, RULING), (MIXED, E01), (SPREAD, E01)):
        basis = common_tangent_space(f, ln)
        for row in ln.rows:
            # the line's rows must be linear combinations of the basis
            assert ExactMatrix(basis + [row]).rank() == len(basis)


def test_residual_line_generic_case():
    """MIXED restricted to span(e0, e1, e4) is u^2 (s + u) by hand."""
    plane = Plane.through(
        [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0]
    )
    res = residual_line(MIXED, E01, plane)
    assert res.kind == "line"
    expected = Line.through([1, 0, 0, 0, -1, 0], [0, 1, 0, 0, 0, 0])
    assert res.line == expected
    assert res.line != E01
    assert contains_line(MIXED, res.line)
    assert plane.contains_line(res.line)


def test_residual_line_triple_case():
    # MIXED on span(e0, e1, e5) restricts to u^3: section is 3L
    plane = Plane.through(
        [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 0, 0, 0, 1]
    )
    res = residual_line(MIXED, E01, plane)
    assert res.kind == "triple"
    assert res.line == E01


def test_residual_line_error_paths():
    pencil_dir = [0, 0, 0, 0, 1, -1]
    inside = Plane(list(RULING.rows) + [pencil_dir])
    with pytest.raises(PlaneInCubic):
        residual_line(FERMAT4, RULING, inside)
    slanted = Plane.through(
        [1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]
    )
    with pytest.raises(NotTangent):
        residual_line(MIXED, E01, slanted)
    apart = Plane.through(
        [0, 0, 1, 0, 0, 0], [0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0]
    )
    with pytest.raises(Exception):
        residual_line(MIXED, E01, apart)


def test_every_tangent_pencil_plane_of_a_ruling_degenerates():
    """For rulings through two flexes all tangent sections are 3L."""
    planes = tangent_planes_pencil(FERMAT4, RULING)
    assert len(planes) >= 2
    seen = set()
    for plane in planes:
        try:
            res = residual_line(FERMAT4, RULING, plane)
        except PlaneInCubic:
            seen.add("inside")
            continue
        assert res.kind == "triple"
        assert res.line == RULING
        seen.add("triple")
    assert "triple" in seen


def test_second_type_pencil_and_gauss_data():
    q1, q2 = second_type_pencil(MIXED, E01)
    # rref of {s^2, t^2}
    assert q1.coeffs == [QOmega(1), QOmega(0), QOmega(0)]
    assert q2.coeffs == [QOmega(0), QOmega(0), QOmega(1)]
    with pytest.raises(NotSecondType):
        second_type_pencil(SPREAD, E01)

    data = gauss_restriction(MIXED, E01)
    # W(s^2, t^2) = 4 s t: ramification at the coordinate points
    roots = {tuple(r) for r in data.factorization.root_points()}
    assert roots == {(QOmega(1), QOmega(0)), (QOmega(0), QOmega(1))}
    s1, t1 = data.apply_involution(1, 1)
    # the sheet swap fixes the ramification parameters only
    assert (s1, t1) not in {(QOmega(1), QOmega(1))}
    p, q = gauss_ramification(MIXED, E01)
    assert {tuple(p), tuple(q)} == {
        (QOmega(1), QOmega(0), QOmega(0), QOmega(0), QOmega(0), QOmega(0)),
        (QOmega(0), QOmega(1), QOmega(0), QOmega(0), QOmega(0), QOmega(0)),
    }
    assert certify_two_to_one(MIXED, E01)
    assert certify_two_to_one(FERMAT4, RULING)


def test_intersect_line_hypersurface():
    quadric = poly(4, [((2, 0, 0, 0), 1), ((0, 2, 0, 0), -1)])
    line = Line.through([1, 0, 0, 0], [0, 1, 0, 0])
    meet = intersect_line_hypersurface(quadric, line)
    assert not meet.infinite
    assert meet.exact
    assert meet.distinct_count() == 2
    assert sum(m for _, m in meet.points) == 2
    inside = Line.through([1, 1, 0, 0], [0, 0, 1, 0])
    assert intersect_line_hypersurface(quadric, inside).infinite
    # smooth conic x0^2 - x1 x2, line through (0,0,1,0) along e0:
    # restriction s^2, a single double point
    cone_q = poly(4, [((2, 0, 0, 0), 1), ((0, 1, 1, 0), -1)])
    tangent = intersect_line_hypersurface(
        cone_q, Line.through([0, 0, 1, 0], [1, 0, 0, 0])
    )
    assert not tangent.infinite
    assert tangent.distinct_count() == 1
    assert tangent.points[0][1] == 2


def test_eckardt_test_on_fermat_points():
    assert eckardt_test(FERMAT4, [1, -1, 0, 0, 0, 0])
    assert eckardt_test(FERMAT4, [0, 0, 1, OMEGA, 0, 0])
    # two-block point: on the cubic but only finitely many lines
    assert not eckardt_test(FERMAT4, [1, -1, 1, -1, 0, 0])
    f3 = fermat_form(3)
    assert eckardt_test(f3, [1, -1, 0, 0, 0])
    assert not eckardt_test(f3, [3, 4, 5, -6, 0])


def test_is_eckardt_point_agrees():
    assert is_eckardt_point(FERMAT4, [0, 0, 0, 0, 1, QOmega(1) - OMEGA])
    assert not is_eckardt_point(FERMAT4, [3, 4, 5, -6, 0, 0])
    with pytest.raises(NotOnCubic):
        is_eckardt_point(FERMAT4, [1, 0, 0, 0, 0, 0])
    cone = poly(4, [((3, 0, 0, 0), 1), ((0, 3, 0, 0), 1), ((0, 0, 3, 0), 1)])
    with pytest.raises(SingularPoint):
        is_eckardt_point(cone, [0, 0, 0, 1])


def test_tangent_residual_point_happy_path():
    """3^3 + 4^3 + 5^3 = 6^3 feeds an all-rational tangent chord."""
    f3s = poly(
        4, [((3, 0, 0, 0), 1), ((0, 3, 0, 0), 1), ((0, 0, 3, 0), 1), ((0, 0, 0, 3), 1)]
    )
    p = [3, 4, 5, -6]
    q = [4, 0, 0, -1]  # q . grad(p) = 3 (9*4 - 36) = 0
    r = tangent_residual_point(f3s, p, q)
    line = Line.through(p, q)
    assert line.contains_point(r)
    assert not f3s.evaluate(r)
    # worked out by hand: -63 p + 126 q = 63 * (5, -4, -5, 4)
    scaled = [v / QOmega(63) for v in r]
    assert scaled == [QOmega(5), QOmega(-4), QOmega(-5), QOmega(4)]
    with pytest.raises(NotTangent):
        tangent_residual_point(f3s, p, [1, 0, 0, 0])
    flex_dir = [0, 0, 1, 0, 0, 0]
    with pytest.raises(FlexPoint):
        tangent_residual_point(FERMAT4, [1, -1, 0, 0, 0, 0], flex_dir)


def test_numeric_type_agrees_with_exact():
    rng = random.Random(6)
    comps = fourfold_components()
    for comp in rng.sample(comps, 12):
        ln = sample_ruling(comp, rng)
        exact = line_type(FERMAT4, ln)
        rows = np.array(
            [[v.to_complex() for v in row] for row in ln.rows]
        )
        numeric, ratio = line_type_numeric(FERMAT4, rows)
        assert numeric is exact
        assert ratio < 1e-8
    rows = np.array(
        [[v.to_complex() for v in row] for row in E01.rows]
    )
    kind, ratio = line_type_numeric(SPREAD, rows)
    assert kind is LineType.FIRST
    assert ratio > 1e-3


def test_residual_line_numeric_matches_exact():
    plane_rows = np.array(
        [
            [1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 0, 0, 1, 0],
        ],
        dtype=complex,
    )
    nline, defect = residual_line_numeric(
        MIXED, plane_rows[:2], plane_rows[2]
    )
    assert defect < 1e-12
    assert nline.point_gap([1, 0, 0, 0, -1, 0]) < 1e-10
    assert nline.point_gap([0, 1, 0, 0, 0, 0]) < 1e-10
    with pytest.raises(NotTangent):
        residual_line_numeric(
            MIXED,
            plane_rows[:2],
            np.array([0, 0, 1, 0, 0, 0], dtype=complex),
        )


def test_span_and_residual_consistency_on_sampled_rulings():
    """Spot version of the 100-line consistency property.

    Every sampled ruling is second type, its common tangent space has
    projective excess 2, and each pencil plane cuts the fourfold in
    either 3L or 2L + residual, with the residual inside both the plane
    and the cubic.
    """
    rng = random.Random(17)
    comps = fourfold_components()
    for _ in range(20):
        comp = rng.choice(comps)
        ln = sample_ruling(comp, rng)
        span = tangent_spans(FERMAT4, ln)
        assert span.quotient_dim == 2
        for plane in tangent_planes_pencil(FERMAT4, ln):
            try:
                res = residual_line(FERMAT4, ln, plane)
            except PlaneInCubic:
                continue
            assert contains_line(FERMAT4, res.line)
            assert plane.contains_line(res.line)
            if res.kind == "triple":
                assert res.line == ln
