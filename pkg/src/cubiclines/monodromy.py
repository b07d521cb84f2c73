"""Permutation bookkeeping and the monodromy experiments.

Three coverings get their groups computed numerically: the six lines
through a moving point of the diagonal cubic threefold, the five other
lines through a point moving along a fixed line, and the four residual
lines over a line of the second kind.  Loops are random triangles kept
clear of the branch locus; each successful loop contributes one
permutation and the generated group is materialized after every loop
until it stabilizes or reaches the full symmetric group.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_CONFIG, ExperimentConfig
from .errors import (
    DegreeMismatch,
    NoConvergence,
    PathCrossing,
    PathFailure,
    SingularJacobian,
    UnexpectedFiber,
)
from .field import OMEGA, QOmega
from .fermat import (
    fermat_form,
    random_curve_point,
    random_hypersurface_point,
    standard_node_config,
    threefold_cones,
    x0_construction,
    as_complex_vector,
)
from .geometry import LineType, line_type, line_type_numeric
from .lines import Line, NumericLine
from .multipoly import MultiPoly
from .solver import (
    LineFiberSystem,
    LoopPath,
    SegmentOnLine,
    SegmentOnSurface,
    monodromy_loop,
    newton_correct,
    safe_triangle_loop,
    solve_lines_through_point,
    track_segment,
)

Permutation = Tuple[int, ...]


# ---------------------------------------------------------------------------
# permutations and generated groups


def identity_permutation(degree: int) -> Permutation:
    return tuple(range(degree))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply q first, then p."""
    if len(p) != len(q):
        raise DegreeMismatch("cannot compose permutations of different degree")
    return tuple(p[q[i]] for i in range(len(p)))


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


class PermGroup:
    """The group generated by a few permutations, fully materialized."""

    MAX_DEGREE = 8

    def __init__(self, degree: int, generators: Sequence[Permutation]):
        if degree > self.MAX_DEGREE:
            raise ValueError("degree too large to materialize")
        for g in generators:
            if len(g) != degree:
                raise DegreeMismatch("generator degree does not match")
            if not is_permutation(g):
                raise DegreeMismatch("generator is not a permutation")
        self.degree = degree
        self.generators = [tuple(g) for g in generators]
        self.elements = self._closure()

    def _closure(self) -> frozenset:
        ident = identity_permutation(self.degree)
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for el in frontier:
                for g in self.generators:
                    h = compose(g, el)
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            frontier = nxt
        return frozenset(seen)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, p: Permutation) -> bool:
        return tuple(p) in self.elements

    def is_symmetric(self) -> bool:
        return self.order == math.factorial(self.degree)

    def has_transposition(self) -> bool:
        for el in self.elements:
            if sum(1 for i, v in enumerate(el) if v != i) == 2:
                return True
        return False

    def transitivity_degree(self) -> int:
        """Largest k with the action transitive on ordered k-tuples."""
        d = self.degree
        k = 0
        while k < d:
            start = tuple(range(k + 1))
            orbit = {start}
            frontier = [start]
            while frontier:
                nxt = []
                for tup in frontier:
                    for g in self.generators:
                        img = tuple(g[i] for i in tup)
                        if img not in orbit:
                            orbit.add(img)
                            nxt.append(img)
                frontier = nxt
            target = 1
            for m in range(k + 1):
                target *= d - m
            if len(orbit) != target:
                return k
            k += 1
        return d


def group_generate(generators: Sequence[Permutation], degree: int) -> PermGroup:
    return PermGroup(degree, list(generators))


# ---------------------------------------------------------------------------
# reports


@dataclass
class GroupReport:
    """Outcome of one monodromy run, JSON-stable field order."""

    degree: int
    order: int
    verdict: str
    generators: List[Permutation]
    loops_used: int
    seed: int
    tolerances: Dict[str, float]

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "order": self.order,
            "verdict": self.verdict,
            "generators": [[i + 1 for i in g] for g in self.generators],
            "loops_used": self.loops_used,
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
        }


def _tolerance_block(cfg: ExperimentConfig) -> Dict[str, float]:
    return {
        "tol_newton": cfg.tol_newton,
        "tol_collision": cfg.tol_collision,
        "tol_cluster": cfg.tol_cluster,
        "min_step": cfg.min_step,
    }


def _verdict(group: PermGroup) -> str:
    return "symmetric" if group.is_symmetric() else "inconclusive"


# ---------------------------------------------------------------------------
# branch locus helpers for the diagonal cubic


_CUBE_ROOTS_MINUS_ONE = (
    -1.0 + 0j,
    np.exp(1j * np.pi / 3),
    np.exp(-1j * np.pi / 3),
)


def branch_parameters_on_line(p: np.ndarray, q: np.ndarray) -> List[complex]:
    """Parameters where x(tau) = p + tau q hits a plane x_a = r x_b, r^3 = -1.

    Those planes carry the entire second-kind locus of the diagonal
    cubic, so the fiber of lines through x(tau) only degenerates there.
    """
    n = len(p)
    out: List[complex] = []
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            for r in _CUBE_ROOTS_MINUS_ONE:
                den = q[a] - r * q[b]
                num = r * p[b] - p[a]
                if abs(den) > 1e-9 * (abs(num) + 1):
                    out.append(num / den)
    return out


# ---------------------------------------------------------------------------
# generic loop accumulation


def _accumulate(
    degree: int,
    loop_maker,
    cap: int,
    window: int,
    seed: int,
    cfg: ExperimentConfig,
) -> GroupReport:
    """Drive loops until the group is full symmetric or stops growing.

    ``loop_maker(attempt)`` returns one permutation or None for a loop
    that had to be discarded.  The report never raises on a cap: an
    undecided run is an answer, not an error.
    """
    generators: List[Permutation] = []
    group = PermGroup(degree, [])
    loops_used = 0
    stable = 0
    for attempt in range(cap):
        if group.is_symmetric():
            break
        perm = loop_maker(attempt)
        if perm is None:
            continue
        loops_used += 1
        if perm in group:
            stable += 1
            if stable >= window:
                break
            continue
        stable = 0
        generators.append(perm)
        group = PermGroup(degree, generators)
    return GroupReport(
        degree=degree,
        order=group.order,
        verdict=_verdict(group),
        generators=generators,
        loops_used=loops_used,
        seed=seed,
        tolerances=_tolerance_block(cfg),
    )


def _draw_functionals(rng: random.Random, n: int):
    mu = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(n)])
    chart = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(n)])
    return mu, chart


def _seed_states(fiber: LineFiberSystem, x0: np.ndarray, directions, cfg):
    fiber.set_base(x0)
    states = []
    for v in directions:
        y = fiber.representative(x0, v)
        states.append(newton_correct(fiber, y, cfg).coordinates)
    return states


# ---------------------------------------------------------------------------
# covering 1: six lines through a moving surface point


def run_six_lines(
    seed: int = 0,
    cap: int = 200,
    cfg: ExperimentConfig = DEFAULT_CONFIG,
) -> GroupReport:
    """Monodromy of the six lines through a point roaming the threefold.

    The base point moves in an affine chart: three coordinates follow a
    random triangle, one is pinned, and one rides the cubic as part of
    the tracked state.  A loop only counts once the riding coordinate
    returns to its starting branch, which takes at most three circuits.
    """
    rng = random.Random(seed)
    f = fermat_form(3)
    n = f.n_vars
    for _ in range(20):
        x0 = random_hypersurface_point(3, rng)
        try:
            sols = solve_lines_through_point(f, x0, cfg)
        except (NoConvergence, SingularJacobian):
            continue
        if len(sols) == 6 and all(s.cluster_size == 1 for s in sols):
            break
    else:
        raise UnexpectedFiber("no clean six-line base fiber found")

    pinned = int(np.argmax(np.abs(x0)))
    x0 = x0 / x0[pinned]
    grad = np.array(
        [df.evaluate_complex(x0) for df in f.gradient()]
    )
    rest = [k for k in range(n) if k != pinned]
    dep = max(rest, key=lambda k: abs(grad[k]))
    free = [k for k in rest if k != dep]

    mu, chart = _draw_functionals(rng, n)
    fiber = LineFiberSystem(f, mu, chart)
    problem = SegmentOnSurface(fiber, f, free, pinned, x0[pinned], dep)
    try:
        base_states = _seed_states(fiber, x0, [s.coordinates for s in sols], cfg)
    except (NoConvergence, SingularJacobian):
        mu, chart = _draw_functionals(rng, n)
        fiber = LineFiberSystem(f, mu, chart)
        problem = SegmentOnSurface(fiber, f, free, pinned, x0[pinned], dep)
        base_states = _seed_states(fiber, x0, [s.coordinates for s in sols], cfg)

    w0 = np.array([x0[k] for k in free])
    dep0 = x0[dep]
    starts = [np.concatenate([[dep0], y]) for y in base_states]

    def one_loop(attempt: int) -> Optional[Permutation]:
        verts = [w0]
        for _ in range(2):
            verts.append(
                w0
                + np.array(
                    [rng.gauss(0, 1.0) + 1j * rng.gauss(0, 1.0) for _ in range(3)]
                )
            )
        verts.append(w0)
        loop = LoopPath(verts)
        states = [s.copy() for s in starts]
        try:
            for _ in range(3):
                for a, b in loop.segments():
                    problem.set_segment(a, b)
                    states = track_segment(problem, states, cfg)
                if abs(states[0][0] - dep0) < 1e-6:
                    break
            else:
                return None  # dependent coordinate refused to close
        except (PathFailure, PathCrossing, SingularJacobian):
            return None
        perm = _match_states(states, starts)
        return perm

    return _accumulate(6, one_loop, cap, cfg.stable_window, seed, cfg)


def _match_states(states, starts) -> Optional[Permutation]:
    perm = []
    for z in states:
        gaps = sorted(
            (float(np.linalg.norm(z - s0) / (1 + np.linalg.norm(s0))), idx)
            for idx, s0 in enumerate(starts)
        )
        best, runner = gaps[0], gaps[1]
        if best[0] > 1e-4 or best[0] > 0.2 * runner[0]:
            return None
        perm.append(best[1])
    if not is_permutation(perm):
        return None
    return tuple(perm)


# ---------------------------------------------------------------------------
# covering 2: five lines through a point sliding along a fixed line


def run_cl(
    seed: int = 0,
    cap: int = 200,
    cfg: ExperimentConfig = DEFAULT_CONFIG,
) -> GroupReport:
    """Monodromy of the other five lines through a point of a fixed line.

    The fixed line is itself part of every fiber, so it is tracked too
    as a consistency anchor and required to return to itself; the
    permutation is read off the remaining five sheets.
    """
    rng = random.Random(seed)
    f = fermat_form(3)
    n = f.n_vars

    for _ in range(20):
        x0 = random_hypersurface_point(3, rng)
        try:
            sols = solve_lines_through_point(f, x0, cfg)
        except (NoConvergence, SingularJacobian):
            continue
        if len(sols) != 6 or any(s.cluster_size != 1 for s in sols):
            continue
        anchor = None
        for s in sols:
            ln = NumericLine.from_points(x0, s.coordinates)
            kind, _ = line_type_numeric(f, ln.basis, cfg.tol_type_second, cfg.tol_type_first)
            if kind is LineType.FIRST:
                anchor = s
                break
        if anchor is not None:
            break
    else:
        raise UnexpectedFiber("no first-kind line found through sampled points")

    p = np.asarray(x0, dtype=complex)
    q = np.asarray(anchor.coordinates, dtype=complex)
    branch = branch_parameters_on_line(p, q)
    mu, chart = _draw_functionals(rng, n)
    fiber = LineFiberSystem(f, mu, chart)
    problem = SegmentOnLine(fiber, p, q)

    tau0 = 0.0 + 0.0j
    order = list(range(6))
    anchor_idx = sols.index(anchor)
    order.remove(anchor_idx)
    directions = [sols[i].coordinates for i in order] + [anchor.coordinates]
    starts = _seed_states(fiber, p / np.linalg.norm(p), directions, cfg)

    def one_loop(attempt: int) -> Optional[Permutation]:
        try:
            loop = safe_triangle_loop(rng, tau0, branch, scale=1.2)
            perm6, _ = monodromy_loop(problem, loop, starts, cfg)
        except (PathFailure, PathCrossing, SingularJacobian):
            return None
        if perm6[5] != 5:
            return None  # the anchor sheet must come back to itself
        return tuple(perm6[:5])

    return _accumulate(5, one_loop, cap, cfg.stable_window, seed, cfg)


# ---------------------------------------------------------------------------
# covering 3: four residual lines over a line of the second kind


def run_cl_second(
    seed: int = 0,
    cap: int = 200,
    cfg: ExperimentConfig = DEFAULT_CONFIG,
) -> GroupReport:
    """Monodromy of the residual fiber over a second-kind line.

    Over a point of such a line the line itself counts twice among the
    six, leaving four residual sheets; their loops land in S4.
    """
    rng = random.Random(seed)
    f = fermat_form(3)
    n = f.n_vars
    cones = threefold_cones()
    cone = cones[rng.randrange(len(cones))]

    for _ in range(20):
        base3 = random_curve_point(rng, size=3)
        p = np.zeros(n, dtype=complex)
        for idx, k in enumerate(cone.complement):
            p[k] = base3[idx]
        q = as_complex_vector(cone.vertex)
        q = q / np.linalg.norm(q)
        tau0 = 0.3 + 0.1j
        x0 = p + tau0 * q
        x0 = x0 / np.linalg.norm(x0)
        try:
            sols = solve_lines_through_point(f, x0, cfg)
        except (NoConvergence, SingularJacobian):
            continue
        sizes = sorted(s.cluster_size for s in sols)
        if sizes == [1, 1, 1, 1, 2]:
            break
    else:
        raise UnexpectedFiber("no doubled fiber over the sampled rulings")

    branch = branch_parameters_on_line(p, q)
    mu, chart = _draw_functionals(rng, n)
    fiber = LineFiberSystem(f, mu, chart)
    problem = SegmentOnLine(fiber, p, q)
    simple = [s.coordinates for s in sols if s.cluster_size == 1]
    starts = _seed_states(fiber, x0, simple, cfg)

    def one_loop(attempt: int) -> Optional[Permutation]:
        try:
            loop = safe_triangle_loop(rng, tau0, branch, scale=1.2)
            perm, _ = monodromy_loop(problem, loop, starts, cfg)
        except (PathFailure, PathCrossing, SingularJacobian):
            return None
        return perm

    return _accumulate(4, one_loop, cap, cfg.stable_window, seed, cfg)


# ---------------------------------------------------------------------------
# exact recognition and the marked-cubic fiber probe


def recognize_field_element(z: complex, tol: float = 1e-6) -> Optional[QOmega]:
    """Recognize a complex number as a + b*w with small rational a, b."""
    root3 = math.sqrt(3.0)
    b = Fraction(2.0 * z.imag / root3).limit_denominator(64)
    a = Fraction(z.real - z.imag / root3).limit_denominator(64)
    cand = QOmega(a, b)
    return cand if abs(cand.to_complex() - z) < tol else None


def promote_direction(v: np.ndarray, tol: float = 1e-6) -> Optional[List[QOmega]]:
    """Rescale a numeric direction into exact field coordinates, if possible."""
    order = np.argsort(-np.abs(v))
    for k in order:
        if abs(v[k]) < 1e-8:
            continue
        scaled = v / v[k]
        exact = []
        for z in scaled:
            r = recognize_field_element(complex(z), tol)
            if r is None:
                exact = None
                break
            exact.append(r)
        if exact is not None:
            return exact
    return None


@dataclass
class FiberLine:
    """One line of a marked-point fiber with its certification."""

    direction: np.ndarray
    cluster_size: int
    kind: Optional[LineType]
    exact: bool

    def to_json(self) -> dict:
        return {
            "direction": [
                {"re": float(c.real), "im": float(c.imag)} for c in self.direction
            ],
            "cluster_size": self.cluster_size,
            "kind": self.kind.value if self.kind else "ambiguous",
            "exact": self.exact,
        }


def ram3fold_probe(
    nodes: int, cfg: ExperimentConfig = DEFAULT_CONFIG
) -> List[FiberLine]:
    """Classify the fiber through the marked point of a degenerate model.

    The plane quadric/cubic pair with 0, 1 or 2 tangencies yields 6, 5
    or 4 lines; doubled ones must certify second kind.  Raises
    UnexpectedFiber when the line count disagrees.
    """
    mc = x0_construction(*standard_node_config(nodes))
    f = mc.form
    sols = solve_lines_through_point(f, mc.marked_point, cfg)
    if len(sols) != 6 - nodes:
        raise UnexpectedFiber(
            "expected %d lines, found %d" % (6 - nodes, len(sols))
        )
    marked = np.array([c.to_complex() for c in mc.marked_point])
    marked = marked / np.linalg.norm(marked)
    out: List[FiberLine] = []
    for s in sols:
        exact_dir = promote_direction(s.coordinates)
        if exact_dir is not None:
            ln = Line.through(list(mc.marked_point), exact_dir)
            kind = line_type(f, ln)
            out.append(FiberLine(s.coordinates, s.cluster_size, kind, True))
        else:
            nl = NumericLine.from_points(marked, s.coordinates)
            kind, _ = line_type_numeric(
                f, nl.basis, cfg.tol_type_second, cfg.tol_type_first
            )
            out.append(FiberLine(s.coordinates, s.cluster_size, kind, False))
    doubled = [fl for fl in out if fl.cluster_size == 2]
    for fl in doubled:
        if fl.kind is not LineType.SECOND:
            raise UnexpectedFiber("a doubled line failed second-kind certification")
    return out
