"""Permutation bookkeeping, loop tracking, and the covering probes."""

import random

import numpy as np
import pytest

from cubiclines.config import DEFAULT_CONFIG
from cubiclines.errors import (
    DegreeMismatch,
    PathCrossing,
    PathFailure,
    SingularJacobian,
)
from cubiclines.fermat import (
    as_complex_vector,
    fermat_form,
    random_curve_point,
    threefold_cones,
)
from cubiclines.field import OMEGA, QOmega
from cubiclines.geometry import LineType
from cubiclines.monodromy import (
    GroupReport,
    PermGroup,
    branch_parameters_on_line,
    compose,
    group_generate,
    identity_permutation,
    is_permutation,
    promote_direction,
    ram3fold_probe,
    recognize_field_element,
    run_cl_second,
)
from cubiclines.solver import (
    LineFiberSystem,
    LoopPath,
    SegmentOnLine,
    monodromy_loop,
    newton_correct,
    safe_triangle_loop,
    solve_lines_through_point,
)

F3 = fermat_form(3)


def test_permutation_primitives():
    assert identity_permutation(4) == (0, 1, 2, 3)
    # q first, then p
    p = (1, 0, 2)
    q = (2, 1, 0)
    assert compose(p, q) == (2, 0, 1)
    assert is_permutation((2, 0, 1))
    assert not is_permutation((0, 0, 1))
    with pytest.raises(DegreeMismatch):
        compose((0, 1), (0, 1, 2))


def test_group_orders_s6():
    s6 = group_generate([(1, 0, 2, 3, 4, 5), (1, 2, 3, 4, 5, 0)], 6)
    assert s6.order == 720
    assert s6.is_symmetric()


def test_group_order_s5_s4():
    s5 = group_generate([(1, 0, 2, 3, 4), (1, 2, 3, 4, 0)], 5)
    assert s5.order == 120
    s4 = group_generate([(1, 0, 2, 3), (1, 2, 3, 0)], 4)
    assert s4.order == 24
    assert s4.transitivity_degree() == 4
    assert s4.has_transposition()


def test_alternating_group_is_not_symmetric():
    a4 = group_generate([(1, 2, 0, 3), (0, 2, 3, 1)], 4)
    assert a4.order == 12
    assert not a4.is_symmetric()
    assert not a4.has_transposition()
    assert a4.transitivity_degree() == 2


def test_klein_four_group_is_barely_transitive():
    v4 = group_generate([(1, 0, 3, 2), (2, 3, 0, 1)], 4)
    assert v4.order == 4
    assert v4.transitivity_degree() == 1


def test_group_validation():
    with pytest.raises(DegreeMismatch):
        group_generate([(0, 1, 2)], 4)
    with pytest.raises(DegreeMismatch):
        group_generate([(0, 0, 1, 2)], 4)
    with pytest.raises(ValueError):
        PermGroup(9, [])
    assert PermGroup(4, []).order == 1


def test_report_json_field_order():
    report = GroupReport(
        degree=4,
        order=24,
        verdict="symmetric",
        generators=[(1, 0, 2, 3)],
        loops_used=7,
        seed=3,
        tolerances={"tol_newton": 1e-12},
    )
    blob = report.to_json()
    assert list(blob.keys()) == [
        "degree",
        "order",
        "verdict",
        "generators",
        "loops_used",
        "seed",
        "tolerances",
    ]
    assert blob["generators"] == [[2, 1, 3, 4]]


def test_recognize_field_element():
    assert recognize_field_element(OMEGA.to_complex()) == OMEGA
    w = recognize_field_element(np.exp(1j * np.pi / 3))
    assert w == OMEGA
    half = recognize_field_element(0.5 + 0j)
    assert half == QOmega.coerce("1/2")
    noisy = recognize_field_element(OMEGA.to_complex() * (1 + 1e-9) + 1e-10j)
    assert noisy == OMEGA
    assert recognize_field_element(complex(np.sqrt(2))) is None


def test_promote_direction():
    exact = [QOmega(1), QOmega(-2, 3), QOmega(0, 1), QOmega.coerce("3/4")]
    vec = np.array([c.to_complex() for c in exact])
    phase = 0.37 - 1.21j
    promoted = promote_direction(vec * phase)
    assert promoted is not None
    # same projective point: cross-ratios of coordinates agree
    assert promoted[1] * exact[0] == promoted[0] * exact[1]
    assert promoted[2] * exact[0] == promoted[0] * exact[2]
    assert promote_direction(np.array([1.0, np.sqrt(2)])) is None


def test_branch_parameters_land_on_walls():
    rng = random.Random(21)
    p = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(5)])
    q = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(5)])
    roots = (-1.0 + 0j, np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 3))
    taus = branch_parameters_on_line(p, q)
    assert len(taus) == 60
    for tau in taus:
        x = p + tau * q
        best = min(
            abs(x[a] - r * x[b])
            for a in range(5)
            for b in range(5)
            if a != b
            for r in roots
        )
        assert best < 1e-8 * (1 + np.max(np.abs(x)))


def test_ram3fold_fibers():
    shapes = {0: [1] * 6, 1: [1, 1, 1, 1, 2], 2: [1, 1, 2, 2]}
    for nodes, shape in shapes.items():
        fiber = ram3fold_probe(nodes)
        assert sorted(fl.cluster_size for fl in fiber) == sorted(shape)
        for fl in fiber:
            if fl.cluster_size == 2:
                assert fl.kind is LineType.SECOND
            else:
                assert fl.kind is LineType.FIRST
            blob = fl.to_json()
            assert set(blob) == {"direction", "cluster_size", "kind", "exact"}


def _cl_second_problem(seed):
    """The four simple sheets over a moving point of a cone ruling."""
    rng = random.Random(seed)
    cone = threefold_cones()[0]
    n = F3.n_vars
    base3 = random_curve_point(rng, size=3)
    p = np.zeros(n, dtype=complex)
    for idx, k in enumerate(cone.complement):
        p[k] = base3[idx]
    q = as_complex_vector(cone.vertex)
    q = q / np.linalg.norm(q)
    tau0 = 0.3 + 0.1j
    x0 = p + tau0 * q
    x0 = x0 / np.linalg.norm(x0)
    sols = solve_lines_through_point(F3, x0)
    assert sorted(s.cluster_size for s in sols) == [1, 1, 1, 1, 2]
    mu = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(n)])
    chart = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(n)])
    fiber = LineFiberSystem(F3, mu, chart)
    problem = SegmentOnLine(fiber, p, q)
    fiber.set_base(x0)
    starts = []
    for s in sols:
        if s.cluster_size != 1:
            continue
        y = fiber.representative(x0, s.coordinates)
        starts.append(newton_correct(fiber, y).coordinates)
    branch = branch_parameters_on_line(p, q)
    return rng, problem, starts, tau0, branch


def _refine(loop):
    pts = list(loop.waypoints) + [loop.waypoints[0]]
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        out.append((a + b) / 2)
        out.append(b)
    return LoopPath(out)


def test_loops_close_and_survive_refinement():
    """Tracked loops give consistent permutations under path refinement.

    Each random loop is tracked three ways: as laid out, with every
    segment split in half, and backwards.  The permutation must agree
    with the refined run and invert under reversal.
    """
    rng, problem, starts, tau0, branch = _cl_second_problem(31)
    closed = 0
    attempts = 0
    while closed < 20 and attempts < 60:
        attempts += 1
        # steps that jump sheets mid-track abort loudly as collisions;
        # generous wall clearance keeps most loops trackable
        loop = safe_triangle_loop(
            rng, tau0, branch, scale=0.6, margin=0.03, segment_margin=0.08
        )
        try:
            perm, _ = monodromy_loop(problem, loop, starts)
            fine_perm, _ = monodromy_loop(problem, _refine(loop), starts)
            if closed < 5:
                back = LoopPath(list(loop.waypoints)[::-1])
                back_perm, _ = monodromy_loop(problem, back, starts)
                assert all(back_perm[perm[i]] == i for i in range(len(perm)))
        except (PathCrossing, PathFailure, SingularJacobian):
            continue
        assert fine_perm == perm
        closed += 1
    assert closed == 20


def test_constant_loop_is_identity():
    rng, problem, starts, tau0, branch = _cl_second_problem(32)
    wiggle = tau0 + 0.02
    loop = LoopPath([tau0, wiggle, tau0])
    perm, states = monodromy_loop(problem, loop, starts)
    assert perm == tuple(range(len(starts)))
    for z, s in zip(states, starts):
        assert np.linalg.norm(z - s) / (1 + np.linalg.norm(s)) < 1e-6


def test_cl_second_run_reaches_s4():
    report = run_cl_second(seed=0, cap=200)
    assert report.degree == 4
    assert report.order == 24
    assert report.verdict == "symmetric"
    assert 0 < report.loops_used <= 200
    assert report.to_json()["seed"] == 0
