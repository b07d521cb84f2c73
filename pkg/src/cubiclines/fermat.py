"""Models of the Fermat cubic threefold and fourfold.

Everything structured about the second-type locus of the Fermat cubics
lives here: the special points where the tangent section is a cone, the
component decomposition of the locus (joins of plane-curve pairs and
cones over low-degree bases), exact ruling constructions, the adjoint
(tangent-process) line, and the numeric tangency counts that produce
the 360 lines through a general point of the fourfold.  A small marked
construction builds cubics whose lines through a chosen point mirror a
prescribed (2,3)-intersection in the plane.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_CONFIG, ExperimentConfig
from .errors import (
    DegeneratePoint,
    FlexPoint,
    NoConvergence,
    NonGenericPoint,
    ParamsOffCurve,
    PointOnCurve,
)
from .field import CUBE_ROOTS_OF_MINUS_ONE, QOmega
from .geometry import f_restrict_binary, residual_line_numeric
from .exactmat import ExactMatrix
from .binaryform import BinaryForm, distinct_root_count, form_gcd
from .lines import Line, NumericLine, dedup_lines
from .multipoly import MultiPoly

Point = Tuple[QOmega, ...]


# ---------------------------------------------------------------------------
# forms and special points


def fermat_form(n: int) -> MultiPoly:
    """The diagonal cubic x_0^3 + ... + x_{n+1}^3 in n+2 variables."""
    f = MultiPoly.zero(n + 2)
    for i in range(n + 2):
        x = MultiPoly.variable(n + 2, i)
        f = f + x * x * x
    return f


@dataclass(frozen=True)
class EckardtPoint:
    """A point whose tangent hyperplane section is a cone.

    On the diagonal cubic these are exactly the points supported on two
    coordinates whose ratio cubes to -1; ``mu`` picks which of the three
    such ratios appears at position ``j``.
    """

    coordinates: Point
    i: int
    j: int
    mu: int

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "mu": self.mu,
            "coordinates": [c.to_json() for c in self.coordinates],
        }


def eckardt_points(n: int) -> List[EckardtPoint]:
    """All cone points of the diagonal cubic of dimension n (45 or 30)."""
    pts = []
    for i, j in combinations(range(n + 2), 2):
        for mu, root in enumerate(CUBE_ROOTS_OF_MINUS_ONE):
            coords = [QOmega.zero()] * (n + 2)
            coords[i] = QOmega.one()
            coords[j] = root
            pts.append(EckardtPoint(tuple(coords), i, j, mu))
    return pts


def curve_flexes(support: Sequence[int], n_vars: int) -> List[Point]:
    """The nine exact points of a diagonal plane cubic, embedded.

    The plane curve u^3 + v^3 + w^3 = 0 meets its own Hessian exactly in
    the points with one coordinate zero and the other two in ratio a
    cube root of -1; these are also its only points over Q(w).
    """
    support = tuple(support)
    flexes = []
    for zero_pos in range(3):
        a, b = [k for k in range(3) if k != zero_pos]
        for root in CUBE_ROOTS_OF_MINUS_ONE:
            coords = [QOmega.zero()] * n_vars
            coords[support[a]] = QOmega.one()
            coords[support[b]] = root
            flexes.append(tuple(coords))
    return flexes


def embed_point(coords: Sequence, support: Sequence[int], n_vars: int) -> Point:
    """Place a short coordinate vector at the given positions, zero elsewhere."""
    if len(coords) != len(support):
        raise ValueError("support length must match coordinate count")
    out = [QOmega.zero()] * n_vars
    for value, pos in zip(coords, support):
        out[pos] = QOmega.coerce(value)
    return tuple(out)


# ---------------------------------------------------------------------------
# components of the second-type locus


@dataclass(frozen=True)
class JoinComponent:
    """Lines spanned by a point on each of two complementary plane cubics.

    The swept threefold is cut out by the two block cubic sums; its
    degree is 9 as a (3,3)-intersection.
    """

    block: Tuple[int, int, int]
    co_block: Tuple[int, int, int]
    n_vars: int = 6

    kind = "join"
    degree = 9

    @property
    def label(self) -> str:
        return "join-%s-%s" % (
            "".join(map(str, self.block)),
            "".join(map(str, self.co_block)),
        )

    def equations(self) -> Tuple[MultiPoly, MultiPoly]:
        return (
            _block_cubic(self.block, self.n_vars),
            _block_cubic(self.co_block, self.n_vars),
        )

    def contains_point(self, x: Sequence) -> bool:
        g1, g2 = self.equations()
        return g1.evaluate(x).is_zero() and g2.evaluate(x).is_zero()

    def to_json(self) -> dict:
        return {
            "kind": "join",
            "block": list(self.block),
            "co_block": list(self.co_block),
            "degree": self.degree,
        }


@dataclass(frozen=True)
class ConeComponent:
    """Lines through one cone point, sweeping a degree-3 cone.

    The cone is cut out by one linear form and the diagonal cubic in the
    complementary coordinates; its vertex is the cone point itself and
    its span is a hyperplane.
    """

    i: int
    j: int
    mu: int
    n_vars: int

    kind = "cone"
    degree = 3

    @property
    def label(self) -> str:
        return "cone-%d%d-mu%d" % (self.i, self.j, self.mu)

    @property
    def vertex(self) -> Point:
        coords = [QOmega.zero()] * self.n_vars
        coords[self.i] = QOmega.one()
        coords[self.j] = CUBE_ROOTS_OF_MINUS_ONE[self.mu]
        return tuple(coords)

    @property
    def complement(self) -> Tuple[int, ...]:
        return tuple(k for k in range(self.n_vars) if k not in (self.i, self.j))

    def hyperplane(self) -> MultiPoly:
        """The linear span of the cone: x_i + r^2 x_j with r the vertex ratio."""
        root = CUBE_ROOTS_OF_MINUS_ONE[self.mu]
        coeffs = [QOmega.zero()] * self.n_vars
        coeffs[self.i] = QOmega.one()
        coeffs[self.j] = root * root
        return MultiPoly.linear_form(coeffs)

    def equations(self) -> Tuple[MultiPoly, MultiPoly]:
        return (self.hyperplane(), _block_cubic(self.complement, self.n_vars))

    def contains_point(self, x: Sequence) -> bool:
        g1, g2 = self.equations()
        return g1.evaluate(x).is_zero() and g2.evaluate(x).is_zero()

    def to_json(self) -> dict:
        return {
            "kind": "cone",
            "i": self.i,
            "j": self.j,
            "mu": self.mu,
            "degree": self.degree,
            "vertex": [c.to_json() for c in self.vertex],
        }


FermatComponent = Union[JoinComponent, ConeComponent]


def _block_cubic(support: Sequence[int], n_vars: int) -> MultiPoly:
    f = MultiPoly.zero(n_vars)
    for k in support:
        x = MultiPoly.variable(n_vars, k)
        f = f + x * x * x
    return f


def fourfold_components() -> List[FermatComponent]:
    """The 55 irreducible pieces of the fourfold's second-type locus.

    Ten joins (one per unordered split of the six coordinates into
    threes) followed by forty-five cones (one per coordinate pair and
    cube root of -1), in a fixed deterministic order.
    """
    comps: List[FermatComponent] = []
    for rest in combinations(range(1, 6), 2):
        block = tuple(sorted((0,) + rest))
        co_block = tuple(k for k in range(6) if k not in block)
        comps.append(JoinComponent(block, co_block))
    for i, j in combinations(range(6), 2):
        for mu in range(3):
            comps.append(ConeComponent(i, j, mu, 6))
    return comps


def threefold_cones() -> List[ConeComponent]:
    """The 30 cones sweeping the threefold's second-type lines.

    Each is the hyperplane section of the threefold at one cone point,
    a degree-3 cone over a diagonal plane cubic.
    """
    return [
        ConeComponent(i, j, mu, 5)
        for i, j in combinations(range(5), 2)
        for mu in range(3)
    ]


# ---------------------------------------------------------------------------
# exact rulings


def ruling_line(comp: FermatComponent, params) -> Line:
    """The ruling through the given base data, checked to lie on the curve(s).

    For a join, params is a pair of 3-coordinate points, one on each
    block cubic.  For a cone, params is a single point of the base cubic
    in the complementary coordinates.
    """
    if isinstance(comp, JoinComponent):
        try:
            p3, q3 = params
        except (TypeError, ValueError):
            raise ParamsOffCurve("a join ruling needs a pair of curve points")
        p3 = [QOmega.coerce(c) for c in p3]
        q3 = [QOmega.coerce(c) for c in q3]
        for triple in (p3, q3):
            if len(triple) != 3:
                raise ParamsOffCurve("block curve points have three coordinates")
            if not _cube_sum(triple).is_zero():
                raise ParamsOffCurve("point not on its block cubic")
            if all(c.is_zero() for c in triple):
                raise ParamsOffCurve("zero vector is not a projective point")
        p = embed_point(p3, comp.block, comp.n_vars)
        q = embed_point(q3, comp.co_block, comp.n_vars)
        return Line.through(p, q)
    base = [QOmega.coerce(c) for c in params]
    if len(base) != len(comp.complement):
        raise ParamsOffCurve("base point size does not match the cone base")
    if not _cube_sum(base).is_zero():
        raise ParamsOffCurve("point not on the cone's base cubic")
    if all(c.is_zero() for c in base):
        raise ParamsOffCurve("zero vector is not a projective point")
    g = embed_point(base, comp.complement, comp.n_vars)
    return Line.through(comp.vertex, g)


def _cube_sum(coords: Sequence[QOmega]) -> QOmega:
    total = QOmega.zero()
    for c in coords:
        total = total + c * c * c
    return total


_PAIRINGS4 = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def cone_base_point(rng: random.Random, size: int) -> List[QOmega]:
    """A random exact point of a diagonal cubic with 3 or 4 coordinates.

    With four coordinates, pair them up and give each pair a ratio that
    cubes to -1, so the cube sums cancel pairwise; with three, fall back
    on the nine exact curve points.
    """
    if size == 3:
        flex = rng.choice(curve_flexes((0, 1, 2), 3))
        return list(flex)
    if size != 4:
        raise ValueError("cone bases here have three or four coordinates")
    pair_a, pair_b = rng.choice(_PAIRINGS4)
    a = QOmega.coerce(rng.randint(1, 9))
    b = QOmega.coerce(rng.randint(0, 9))
    root_a = rng.choice(CUBE_ROOTS_OF_MINUS_ONE)
    root_b = rng.choice(CUBE_ROOTS_OF_MINUS_ONE)
    coords = [QOmega.zero()] * 4
    coords[pair_a[0]] = a
    coords[pair_a[1]] = root_a * a
    coords[pair_b[0]] = b
    coords[pair_b[1]] = root_b * b
    return coords


def sample_ruling(comp: FermatComponent, rng: random.Random) -> Line:
    """A random exact ruling of the component."""
    if isinstance(comp, JoinComponent):
        p3 = rng.choice(curve_flexes((0, 1, 2), 3))
        q3 = rng.choice(curve_flexes((0, 1, 2), 3))
        return ruling_line(comp, (p3, q3))
    return ruling_line(comp, cone_base_point(rng, len(comp.complement)))


# ---------------------------------------------------------------------------
# block splits and the sign-flip line


def block_split(x: Sequence[QOmega], n_vars: Optional[int] = None):
    """All bipartitions of the coordinates on which x has zero cube sums.

    Returned as (block containing 0, complement) pairs, smallest blocks
    first; each certifies that x lies on the corresponding join or
    pair-type locus.
    """
    coords = [QOmega.coerce(c) for c in x]
    n = n_vars or len(coords)
    splits = []
    indices = list(range(n))
    for size in range(1, n):
        for rest in combinations(range(1, n), size - 1):
            block = (0,) + rest
            co = tuple(k for k in indices if k not in block)
            s1 = _cube_sum([coords[k] for k in block])
            s2 = _cube_sum([coords[k] for k in co])
            if s1.is_zero() and s2.is_zero():
                splits.append((block, co))
    return splits


def block_projection(x: Sequence[QOmega], block: Sequence[int]) -> Point:
    """The point with x's coordinates on the block and zeros elsewhere."""
    out = [QOmega.zero()] * len(x)
    for k in block:
        out[k] = QOmega.coerce(x[k])
    return tuple(out)


def second_type_line_through(
    x: Sequence, split: Optional[Tuple[Sequence[int], Sequence[int]]] = None
) -> Line:
    """The line through x spanned with its one-block sign flip.

    x must have zero cube sums on both halves of some coordinate
    bipartition; flipping the sign of one half gives a second point of
    the same kind, and the connecting line lies on the cubic.  Its two
    branch points under the degree-two tangent-space map are exactly the
    block projections of x.
    """
    coords = [QOmega.coerce(c) for c in x]
    if split is not None:
        block, co = tuple(split[0]), tuple(split[1])
        if not (
            _cube_sum([coords[k] for k in block]).is_zero()
            and _cube_sum([coords[k] for k in co]).is_zero()
        ):
            raise ParamsOffCurve("point has a nonzero cube sum on the given block")
        candidates = [(block, co)]
    else:
        candidates = block_split(coords)
        if not candidates:
            raise ParamsOffCurve("point lies on no block-split locus")
    for block, co in candidates:
        proj1 = [coords[k] for k in block]
        proj2 = [coords[k] for k in co]
        if all(c.is_zero() for c in proj1) or all(c.is_zero() for c in proj2):
            continue
        flipped = list(coords)
        for k in block:
            flipped[k] = -coords[k]
        return Line.through(coords, flipped)
    raise DegeneratePoint("every admissible split leaves one block zero")


# ---------------------------------------------------------------------------
# the adjoint (tangent-process) line


def tangent_process(p3: Sequence[QOmega]) -> Point:
    """Third intersection of the tangent at p with the diagonal plane cubic.

    Classical duplication on u^3 + v^3 + w^3 = 0: the tangent at
    (a, b, c) meets the curve again at
    (a(b^3 - c^3), b(c^3 - a^3), c(a^3 - b^3)).  At a flex (one zero
    coordinate) this returns the point itself, which we flag instead.
    """
    a, b, c = [QOmega.coerce(v) for v in p3]
    if not _cube_sum([a, b, c]).is_zero():
        raise ParamsOffCurve("tangent process needs a point of the curve")
    if a.is_zero() or b.is_zero() or c.is_zero():
        raise FlexPoint("tangent meets the curve triply here")
    a3, b3, c3 = a * a * a, b * b * b, c * c * c
    return (a * (b3 - c3), b * (c3 - a3), c * (a3 - b3))


def _join_split_of_line(line: Line, splits) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    for block, co in splits:
        m_block = [[row[k] for k in block] for row in line.rows]
        m_co = [[row[k] for k in co] for row in line.rows]
        if ExactMatrix(m_block).rank() == 1 and ExactMatrix(m_co).rank() == 1:
            return block, co
    return None


def _line_block_point(line: Line, block, co) -> List[QOmega]:
    """The unique point of the line supported on the block, in block coords."""
    m_co = ExactMatrix([[row[k] for k in co] for row in line.rows])
    combos = m_co.transpose().kernel_basis()
    if len(combos) != 1:
        raise ParamsOffCurve("line has no unique block-supported point")
    alpha, beta = combos[0]
    full = [alpha * a + beta * b for a, b in zip(line.rows[0], line.rows[1])]
    return [full[k] for k in block]


def adjoint_line(line: Line, split: Optional[Tuple[Sequence[int], Sequence[int]]] = None) -> Line:
    """The companion ruling through the tangent-process images.

    A join ruling joins one point on each block curve; applying the
    tangent process on both sides gives two new curve points, and the
    line they span is again a ruling of the same join.
    """
    n = len(line.rows[0])
    if split is not None:
        splits = [(tuple(split[0]), tuple(split[1]))]
    else:
        splits = []
        for rest in combinations(range(1, n), 2):
            block = tuple(sorted((0,) + rest))
            co = tuple(k for k in range(n) if k not in block)
            splits.append((block, co))
    found = _join_split_of_line(line, splits)
    if found is None:
        raise ParamsOffCurve("line is not a ruling of a join component")
    block, co = found
    p3 = _line_block_point(line, block, co)
    q3 = _line_block_point(line, co, block)
    p_new = tangent_process(p3)
    q_new = tangent_process(q3)
    return Line.through(
        embed_point(p_new, block, n), embed_point(q_new, co, n)
    )


# ---------------------------------------------------------------------------
# numeric tangency machinery


def as_complex_vector(x: Sequence) -> np.ndarray:
    out = []
    for c in x:
        out.append(c.to_complex() if isinstance(c, QOmega) else complex(c))
    return np.array(out, dtype=complex)


def _poly_roots_with_infinity(coeffs_ascending: np.ndarray, expected: int):
    """Roots of a degree-``expected`` polynomial, np.inf for each lost top term."""
    coeffs = np.asarray(coeffs_ascending, dtype=complex)
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        raise NonGenericPoint("identically zero restriction")
    roots: List[complex] = []
    top = expected
    while top >= 0 and abs(coeffs[top]) < 1e-10 * scale:
        roots.append(np.inf)
        top -= 1
    if top <= 0:
        raise NonGenericPoint("restriction dropped to a constant")
    finite = np.roots(coeffs[: top + 1][::-1])
    roots.extend(finite.tolist())
    if len(roots) != expected:
        raise NonGenericPoint("root count does not match the expected degree")
    return roots


def _polish_on_conic_and_cubic(
    w: np.ndarray, e: np.ndarray, cfg: ExperimentConfig
) -> np.ndarray:
    """Newton-refine w on {polar conic of e} ∩ {diagonal cubic} in a chart."""
    w = np.array(w, dtype=complex)
    chart = int(np.argmax(np.abs(w)))
    free = [k for k in range(3) if k != chart]

    for _ in range(cfg.max_newton_iters):
        fval = np.array([np.sum(e * w * w), np.sum(w**3)])
        if np.max(np.abs(fval)) < cfg.tol_newton:
            return w
        jac = np.array(
            [
                [2 * e[free[0]] * w[free[0]], 2 * e[free[1]] * w[free[1]]],
                [3 * w[free[0]] ** 2, 3 * w[free[1]] ** 2],
            ]
        )
        try:
            delta = np.linalg.solve(jac, fval)
        except np.linalg.LinAlgError:
            raise NoConvergence("singular polish step on the tangency system")
        w[free[0]] -= delta[0]
        w[free[1]] -= delta[1]
    if np.max(np.abs([np.sum(e * w * w), np.sum(w**3)])) < 1e3 * cfg.tol_newton:
        return w
    raise NoConvergence("tangency point did not converge")


_PARAM_TWIST = 0.6180339887498949 + 0.3819660112501051j


def tangent_lines_from(e: Sequence, cfg: ExperimentConfig = DEFAULT_CONFIG) -> List[np.ndarray]:
    """Tangency points of the six tangent lines from e to u^3+v^3+w^3 = 0.

    The contact points are the intersection of the curve with the polar
    conic of e.  The conic is rationally parametrized through one of its
    points and the composed binary sextic is solved numerically, then
    each root is Newton-polished on the (conic, cubic) pair.
    """
    exact = all(isinstance(c, QOmega) for c in e)
    if exact:
        if _cube_sum([QOmega.coerce(c) for c in e]).is_zero():
            raise PointOnCurve("tangency count needs an external point")
    ec = as_complex_vector(e)
    scale = np.max(np.abs(ec))
    if scale == 0.0:
        raise NonGenericPoint("zero vector is not a projective point")
    ec = ec / scale
    if not exact and abs(np.sum(ec**3)) < 1e-12:
        raise PointOnCurve("tangency count needs an external point")
    if abs(ec[0] * ec[1] * ec[2]) < 1e-12:
        raise NonGenericPoint("polar conic is singular for coordinate points")

    p0 = np.array([np.sqrt(-ec[1]), np.sqrt(ec[0]), 0.0], dtype=complex)
    a_dir = np.array([0.0, 0.0, 1.0], dtype=complex)
    twist = _PARAM_TWIST
    for _ in range(4):
        b_dir = np.array([1.0, twist, 0.0], dtype=complex)
        stray = p0 - (p0 @ b_dir.conj()) / (b_dir @ b_dir.conj()) * b_dir
        if np.linalg.norm(stray) > 1e-9:
            break
        twist = twist * (1.37 + 0.21j)
    else:
        raise NonGenericPoint("could not place a parameter line for the conic")

    def pair(u, v):
        return np.sum(ec * u * v)

    # D(t) = b_dir + t*a_dir; phi(t) = Q(D) p0 - 2 b(p0, D) D, quadratic per coord
    q_d = np.array([pair(b_dir, b_dir), 2 * pair(b_dir, a_dir), pair(a_dir, a_dir)])
    b_pd = np.array([pair(p0, b_dir), pair(p0, a_dir)])
    phi = np.zeros((3, 3), dtype=complex)
    for c in range(3):
        phi[c] = q_d * p0[c]
        phi[c] -= 2.0 * np.convolve(b_pd, np.array([b_dir[c], a_dir[c]]))
    sextic = np.zeros(7, dtype=complex)
    for c in range(3):
        sextic += np.convolve(np.convolve(phi[c], phi[c]), phi[c])

    points = []
    for root in _poly_roots_with_infinity(sextic, 6):
        if root is np.inf:
            w = phi[:, 2].copy()
        else:
            w = phi @ np.array([1.0, root, root * root])
        top = np.max(np.abs(w))
        if top < 1e-12:
            raise NonGenericPoint("degenerate tangency point on the conic")
        w = w / w[int(np.argmax(np.abs(w)))]
        points.append(_polish_on_conic_and_cubic(w, ec, cfg))
    return points


# ---------------------------------------------------------------------------
# exact rational points of the fourfold


def euler_triple(t) -> Tuple[QOmega, QOmega, QOmega]:
    """An exact solution of a^3 + b^3 + c^3 = 1 depending on one parameter."""
    t = QOmega.coerce(Fraction(t) if not isinstance(t, (QOmega, Fraction)) else t)
    t3 = t * t * t
    t4 = t3 * t
    nine = QOmega.coerce(9)
    three = QOmega.coerce(3)
    one = QOmega.one()
    return (nine * t4, three * t - nine * t4, one - nine * t3)


def fourfold_point_from_params(t1, t2) -> Point:
    """A rational point of the fourfold from two parameters.

    The first three coordinates have cube sum 1 and the sign-flipped
    last three have cube sum -1.
    """
    first = euler_triple(t1)
    second = euler_triple(t2)
    return tuple(list(first) + [-c for c in second])


def is_generic_fourfold_point(x: Sequence[QOmega]) -> bool:
    """Off every join, every pair locus, and every cone span — checked exactly."""
    coords = [QOmega.coerce(c) for c in x]
    if len(coords) != 6:
        return False
    if any(c.is_zero() for c in coords):
        return False
    for i, j in combinations(range(6), 2):
        if _cube_sum([coords[i], coords[j]]).is_zero():
            return False
    for block, co in _THREE_SPLITS:
        if _cube_sum([coords[k] for k in block]).is_zero():
            return False
    return True


_THREE_SPLITS = tuple(
    (tuple(sorted((0,) + rest)), tuple(k for k in range(6) if k not in (0,) + rest))
    for rest in combinations(range(1, 6), 2)
)


def special_rational_point(rng: random.Random) -> Point:
    """A rational fourfold point supported on two scaled curve points."""
    rest = rng.sample(range(1, 6), 2)
    block = tuple(sorted([0] + rest))
    co = tuple(k for k in range(6) if k not in block)
    fa = rng.choice(curve_flexes((0, 1, 2), 3))
    fb = rng.choice(curve_flexes((0, 1, 2), 3))
    s = QOmega.coerce(rng.randint(1, 9))
    r = QOmega.coerce(rng.randint(1, 9))
    out = [QOmega.zero()] * 6
    for idx, k in enumerate(block):
        out[k] = s * fa[idx]
    for idx, k in enumerate(co):
        out[k] = r * fb[idx]
    return tuple(out)


def chord_point(u: Sequence[QOmega], v: Sequence[QOmega]) -> Point:
    """Third intersection of the chord through two cubic points.

    With both endpoints on the cubic, the restriction has roots at each
    end and the leftover root is rational in the endpoints:
    c2*u - c1*v with c1 = 3 sum(u^2 v), c2 = 3 sum(u v^2).
    """
    u = [QOmega.coerce(c) for c in u]
    v = [QOmega.coerce(c) for c in v]
    c1 = QOmega.zero()
    c2 = QOmega.zero()
    for a, b in zip(u, v):
        c1 = c1 + a * a * b
        c2 = c2 + a * b * b
    if c1.is_zero() or c2.is_zero():
        raise DegeneratePoint("chord is tangent at an endpoint")
    return tuple(c2 * a - c1 * b for a, b in zip(u, v))


def random_generic_point(rng: random.Random, max_tries: int = 200) -> Point:
    """A seeded exact fourfold point passing every genericity test.

    Chords between two special rational points land back on the cubic at
    a third rational point with healthy, same-scale block sums (the
    one-parameter identity solutions have nearly vanishing ones, which
    wrecks the conditioning of everything tangency-based downstream).
    """
    for _ in range(max_tries):
        u = special_rational_point(rng)
        v = special_rational_point(rng)
        try:
            candidate = chord_point(u, v)
        except DegeneratePoint:
            continue
        if not is_generic_fourfold_point(candidate):
            continue
        pc = as_complex_vector(candidate)
        if _near_flex_projection(pc):
            continue
        return candidate
    raise NonGenericPoint("no generic rational point found in the budget")


def _near_flex_projection(pc: np.ndarray, gap: float = 0.02) -> bool:
    """True when some block projection nearly aligns with a curve flex."""
    flex_dirs = [
        as_complex_vector(fl) for fl in curve_flexes((0, 1, 2), 3)
    ]
    flex_dirs = [d / np.linalg.norm(d) for d in flex_dirs]
    for block, co in _THREE_SPLITS:
        for support in (block, co):
            v = pc[list(support)]
            v = v / np.linalg.norm(v)
            for d in flex_dirs:
                if np.sqrt(max(0.0, 1.0 - min(1.0, abs(np.vdot(v, d))) ** 2)) < gap:
                    return True
    return False


# ---------------------------------------------------------------------------
# the 360 lines through a general point


@dataclass
class Count360Result:
    point: Sequence
    lines: List[NumericLine]
    per_component: Dict[str, int]
    max_containment: float
    max_tangency_defect: float

    def to_json(self) -> dict:
        return {
            "total": len(self.lines),
            "per_component": dict(sorted(self.per_component.items())),
            "max_containment": self.max_containment,
            "max_tangency_defect": self.max_tangency_defect,
        }


def count_360(x: Sequence, cfg: ExperimentConfig = DEFAULT_CONFIG) -> Count360Result:
    """All lines through a general fourfold point via tangency pairs.

    For each of the ten joins, project the point into both block planes,
    take the six tangency points on each side, join each tangency pair
    into a ruling, and pass the plane it spans with the point through
    the residual construction.  Each residual passes back through the
    point; after global deduplication exactly 360 distinct lines remain.
    The cones contribute nothing at a general point.
    """
    f = fermat_form(4)
    pc = as_complex_vector(x)
    pc = pc / np.linalg.norm(pc)
    all_lines: List[NumericLine] = []
    per_component: Dict[str, int] = {}
    max_contain = 0.0
    max_defect = 0.0
    for comp in fourfold_components():
        if not isinstance(comp, JoinComponent):
            continue
        try:
            near = tangent_lines_from([pc[k] for k in comp.block], cfg)
            far = tangent_lines_from([pc[k] for k in comp.co_block], cfg)
        except (PointOnCurve, NoConvergence) as exc:
            raise NonGenericPoint("tangency step degenerated: %s" % exc)
        comp_lines = []
        for w in near:
            w_full = np.zeros(6, dtype=complex)
            for idx, k in enumerate(comp.block):
                w_full[k] = w[idx]
            for z in far:
                z_full = np.zeros(6, dtype=complex)
                for idx, k in enumerate(comp.co_block):
                    z_full[k] = z[idx]
                residual, defect = residual_line_numeric(
                    f, [w_full, z_full], pc, tol_tangent=cfg.tol_tangent
                )
                gap = residual.point_gap(pc)
                max_defect = max(max_defect, defect)
                max_contain = max(max_contain, gap)
                if gap > cfg.tol_containment:
                    raise NonGenericPoint("residual line misses the base point")
                comp_lines.append(residual)
        distinct = dedup_lines(comp_lines, cfg.tol_dedup)
        per_component[comp.label] = len(distinct)
        if len(distinct) != 36:
            raise NonGenericPoint(
                "component %s gave %d lines instead of 36" % (comp.label, len(distinct))
            )
        all_lines.extend(comp_lines)
    lines = dedup_lines(all_lines, cfg.tol_dedup)
    return Count360Result(
        point=list(x),
        lines=lines,
        per_component=per_component,
        max_containment=max_contain,
        max_tangency_defect=max_defect,
    )


# ---------------------------------------------------------------------------
# numeric samplers on the models


def random_curve_point(rng: random.Random, size: int = 3) -> np.ndarray:
    """A numeric point of the diagonal cubic curve or surface.

    Fix all but the last coordinate at random complex values and take a
    cube root for the last.
    """
    while True:
        head = np.array(
            [rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(size - 1)]
        )
        if np.min(np.abs(head)) < 1e-3:
            continue
        tail = (-np.sum(head**3)) ** (1.0 / 3.0)
        point = np.append(head, tail)
        # points with one small coordinate sit close to a flex of the
        # curve (or its higher-dimensional analogue), where line fibers
        # downstream degenerate; keep a safety margin
        if np.min(np.abs(point)) < 0.05 * np.max(np.abs(point)):
            continue
        return point / point[int(np.argmax(np.abs(point)))]


def random_cone_point(
    cone: ConeComponent, rng: random.Random, spread: float = 1.0
) -> np.ndarray:
    """A numeric point on the cone, away from the vertex and the base."""
    base = random_curve_point(rng, size=len(cone.complement))
    full = np.zeros(cone.n_vars, dtype=complex)
    for idx, k in enumerate(cone.complement):
        full[k] = base[idx]
    vertex = as_complex_vector(cone.vertex)
    lam = spread * (rng.gauss(0, 1) + 1j * rng.gauss(0, 1))
    while abs(lam) < 0.2:
        lam = spread * (rng.gauss(0, 1) + 1j * rng.gauss(0, 1))
    point = lam * vertex + full
    return point / point[int(np.argmax(np.abs(point)))]


def random_hypersurface_point(n: int, rng: random.Random) -> np.ndarray:
    """A numeric point of the dimension-n diagonal cubic."""
    point = random_curve_point(rng, size=n + 2)
    return point


# ---------------------------------------------------------------------------
# exact meeting of a line with a component


@dataclass
class ComponentMeeting:
    """How an exact line meets a component, computed by restriction gcd."""

    infinite: bool
    common_form: Optional[BinaryForm]
    distinct_points: Optional[int]


def line_meets_component(comp: FermatComponent, line: Line) -> ComponentMeeting:
    """Common zeros on the line of the component's defining equations."""
    g1, g2 = comp.equations()
    b1 = f_restrict_binary(g1, line)
    b2 = f_restrict_binary(g2, line)
    if b1.is_zero() and b2.is_zero():
        return ComponentMeeting(True, None, None)
    if b1.is_zero():
        common = b2
    elif b2.is_zero():
        common = b1
    else:
        common = form_gcd(b1, b2)
    if common.degree == 0:
        return ComponentMeeting(False, common, 0)
    return ComponentMeeting(False, common, distinct_root_count(common))


# ---------------------------------------------------------------------------
# marked cubics from plane data


@dataclass(frozen=True)
class MarkedCubic:
    """A cubic with a chosen smooth point whose line fiber is prescribed.

    Lines through the marked point correspond exactly to the
    intersection of the plane quadric and plane cubic the construction
    started from, so tangencies between those two curves become doubled
    lines upstairs.
    """

    form: MultiPoly
    marked_point: Point
    plane_quadric: MultiPoly
    plane_cubic: MultiPoly
    provenance: str

    def line_through(self, v: Sequence) -> Line:
        """The line through the marked point over a plane intersection point."""
        n = self.form.n_vars
        direction = [QOmega.zero()] * n
        for k, c in enumerate(v):
            direction[k] = QOmega.coerce(c)
        return Line.through(self.marked_point, direction)

    def to_json(self) -> dict:
        return {
            "form": self.form.to_json(),
            "marked_point": [c.to_json() for c in self.marked_point],
            "provenance": self.provenance,
        }


def _pad_vars(f: MultiPoly, extra: int) -> MultiPoly:
    terms = {}
    for exps, c in f.terms.items():
        terms[exps + (0,) * extra] = c
    return MultiPoly(f.n_vars + extra, terms)


def x0_construction(f2: MultiPoly, f3: MultiPoly, provenance: str = "") -> MarkedCubic:
    """A cubic whose lines through one point mirror V(f2) ∩ V(f3).

    With f2 a plane quadric and f3 a plane cubic in m variables, build
      g = f2*x_m + f3 + x_m^2 x_{m+1} + x_{m+1}^3
    in m+2 variables.  The marked point e_m is smooth on V(g) and a
    direction (v, 0, 0) spans a line of V(g) through it exactly when
    f2(v) = f3(v) = 0; the cube term keeps the far coordinate point off
    the singular locus.
    """
    if f2.n_vars != f3.n_vars:
        raise ValueError("quadric and cubic must share a variable count")
    m = f2.n_vars
    n_vars = m + 2
    f2_big = _pad_vars(f2, 2)
    f3_big = _pad_vars(f3, 2)
    xm = MultiPoly.variable(n_vars, m)
    xlast = MultiPoly.variable(n_vars, m + 1)
    g = f2_big * xm + f3_big + xm * xm * xlast + xlast * xlast * xlast
    marked = tuple(
        QOmega.one() if k == m else QOmega.zero() for k in range(n_vars)
    )
    return MarkedCubic(g, marked, f2, f3, provenance)


def standard_node_config(nodes: int) -> Tuple[MultiPoly, MultiPoly]:
    """Plane (quadric, cubic) pairs whose intersection has 0, 1, or 2 doubles.

    The cubic is x2*f2 plus a product of three lines, so on the conic
    the intersection is just conic ∩ lines: a line tangent to the conic
    contributes one double point, a secant two simple ones.
    """
    x0 = MultiPoly.variable(3, 0)
    x1 = MultiPoly.variable(3, 1)
    x2 = MultiPoly.variable(3, 2)
    f2 = x0 * x0 + x1 * x1 - x2 * x2
    multiplier = x2
    if nodes == 0:
        lines = (x0, x1, x0 - x1)
    elif nodes == 1:
        lines = (x1 - x2, x1, x0 + MultiPoly.constant(3, 2) * x2)
    elif nodes == 2:
        # with two tangent lines the multiplier must avoid making the
        # cubic itself singular at either tangency point (the doubles
        # must stay doubles of the intersection, not of the curve)
        lines = (x1 - x2, x0 - x2, x0 + MultiPoly.constant(3, 2) * x2)
        multiplier = x0
    else:
        raise ValueError("configurations exist for 0, 1, or 2 double points")
    f3 = multiplier * f2 + lines[0] * lines[1] * lines[2]
    return f2, f3
