"""Floating-point layer: complex polynomials, Newton, line fibers."""

import random
from fractions import Fraction

import numpy as np
import pytest

from cubiclines.errors import (
    NoConvergence,
    NonIsolated,
    NotOnCubic,
    SingularJacobian,
    SingularPoint,
)
from cubiclines.fermat import (
    as_complex_vector,
    fermat_form,
    random_cone_point,
    random_hypersurface_point,
    standard_node_config,
    threefold_cones,
    x0_construction,
)
from cubiclines.field import QOmega
from cubiclines.multipoly import MultiPoly
from cubiclines.solver import (
    ComplexPoly,
    ComplexSystem,
    newton_correct,
    solve_lines_through_point,
)

F3 = fermat_form(3)


def rand_poly(rng, n_vars, max_deg, n_terms=8):
    terms = {}
    for _ in range(n_terms):
        exps = [0] * n_vars
        for _ in range(rng.randint(0, max_deg)):
            exps[rng.randrange(n_vars)] += 1
        coeff = QOmega(
            Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
            Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
        )
        terms[tuple(exps)] = coeff
    return MultiPoly(n_vars, terms)


def test_complex_poly_matches_exact_evaluation():
    rng = random.Random(11)
    for _ in range(30):
        f = rand_poly(rng, 4, 3)
        fc = ComplexPoly.from_exact(f)
        z = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(4)])
        assert abs(fc.evaluate(z) - f.evaluate_complex(z)) < 1e-10


def test_partial_matches_exact_partial():
    rng = random.Random(12)
    for _ in range(20):
        f = rand_poly(rng, 3, 3)
        fc = ComplexPoly.from_exact(f)
        k = rng.randrange(3)
        dfc = ComplexPoly.from_exact(f.partial(k))
        z = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(3)])
        assert abs(fc.partial(k).evaluate(z) - dfc.evaluate(z)) < 1e-10


def test_zero_polynomial_evaluates_to_zero():
    fc = ComplexPoly.from_exact(MultiPoly.zero(3))
    z = np.array([1.0 + 2j, -0.5, 3.0])
    assert fc.evaluate(z) == 0


def test_jacobian_against_finite_differences():
    """Analytic Jacobians of random systems agree with central differences."""
    rng = random.Random(13)
    h = 1e-5
    worst = 0.0
    for _ in range(100):
        polys = [rand_poly(rng, 4, 3) for _ in range(3)]
        system = ComplexSystem.from_exact(polys)
        z = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(4)])
        jac = system.jacobian(z)
        fd = np.zeros_like(jac)
        for k in range(4):
            dz = np.zeros(4, dtype=complex)
            dz[k] = h
            fd[:, k] = (system.evaluate(z + dz) - system.evaluate(z - dz)) / (2 * h)
        scale = max(1.0, float(np.max(np.abs(jac))))
        worst = max(worst, float(np.max(np.abs(fd - jac))) / scale)
    assert worst < 1e-6


def test_system_shape_validation():
    with pytest.raises(ValueError):
        ComplexSystem([])
    f = ComplexPoly.from_exact(rand_poly(random.Random(0), 3, 2))
    g = ComplexPoly.from_exact(rand_poly(random.Random(1), 4, 2))
    with pytest.raises(ValueError):
        ComplexSystem([f, g])


def test_newton_converges_on_simple_root():
    system = ComplexSystem.from_exact(
        [
            MultiPoly(2, {(2, 0): QOmega(1), (0, 2): QOmega(1), (0, 0): QOmega(-2)}),
            MultiPoly(2, {(1, 0): QOmega(1), (0, 1): QOmega(-1)}),
        ]
    )
    sol = newton_correct(system, np.array([1.3 + 0.1j, 0.8]))
    assert np.max(np.abs(sol.coordinates - np.array([1.0, 1.0]))) < 1e-10
    assert sol.residual < 1e-12
    assert sol.is_simple


def test_newton_reports_cycling():
    # the classic period-two orbit 0 -> 1 -> 0 of x^3 - 2x + 2
    system = ComplexSystem.from_exact(
        [
            MultiPoly(
                1, {(3,): QOmega(1), (1,): QOmega(-2), (0,): QOmega(2)}
            )
        ]
    )
    with pytest.raises(NoConvergence):
        newton_correct(system, np.array([0.0 + 0j]))


def test_newton_reports_singular_jacobian():
    # both rows of the Jacobian are (y, x) everywhere, and the system
    # is inconsistent, so the failure is structural
    xy = MultiPoly(2, {(1, 1): QOmega(1)})
    system = ComplexSystem.from_exact([xy, xy + MultiPoly.constant(2, 1)])
    with pytest.raises(SingularJacobian):
        newton_correct(system, np.array([0.7, -0.4 + 0.2j]))


def line_residual(f, x, v):
    fc = ComplexPoly.from_exact(f)
    xc = as_complex_vector(x)
    xc = xc / np.linalg.norm(xc)
    return max(abs(fc.evaluate(xc + t * v)) for t in (0.7, -1.3, 2.1))


def test_six_lines_through_generic_threefold_point():
    rng = random.Random(14)
    x = random_hypersurface_point(3, rng)
    sols = solve_lines_through_point(F3, x)
    assert len(sols) == 6
    for s in sols:
        assert s.is_simple
        assert s.residual < 1e-8
        assert line_residual(F3, x, s.coordinates) < 1e-6
    # directions are pairwise distinct as projective points
    for i in range(6):
        for j in range(i + 1, 6):
            vi, vj = sols[i].coordinates, sols[j].coordinates
            overlap = abs(np.vdot(vi, vj))
            assert overlap < 1 - 1e-6


def test_five_lines_through_cone_point():
    rng = random.Random(15)
    cone = threefold_cones()[7]
    x = random_cone_point(cone, rng)
    sols = solve_lines_through_point(F3, x)
    assert sorted(s.cluster_size for s in sols) == [1, 1, 1, 1, 2]
    doubled = next(s for s in sols if s.cluster_size == 2)
    assert line_residual(F3, x, doubled.coordinates) < 1e-5


def test_marked_cubic_fibers_shrink_with_tangencies():
    expected = {0: [1] * 6, 1: [1, 1, 1, 1, 2], 2: [1, 1, 2, 2]}
    for nodes, shape in expected.items():
        mc = x0_construction(*standard_node_config(nodes))
        sols = solve_lines_through_point(mc.form, mc.marked_point)
        assert sorted(s.cluster_size for s in sols) == sorted(shape)
        for s in sols:
            assert line_residual(mc.form, mc.marked_point, s.coordinates) < 1e-5


def test_fiber_error_paths():
    with pytest.raises(NotOnCubic):
        solve_lines_through_point(F3, [1, 2, 3, 4, 5])
    # a cone vertex carries a whole curve of lines
    with pytest.raises(NonIsolated):
        solve_lines_through_point(F3, threefold_cones()[0].vertex)
    # a singular point of a degenerate cubic
    blockf = MultiPoly(
        5,
        {
            (3, 0, 0, 0, 0): QOmega(1),
            (0, 3, 0, 0, 0): QOmega(1),
            (0, 0, 3, 0, 0): QOmega(1),
        },
    )
    with pytest.raises(SingularPoint):
        solve_lines_through_point(blockf, [0, 0, 0, 1, 0])
