"""Line geometry on cubic hypersurfaces.

The classification of a line L on a smooth cubic X runs through the
gradient of the cubic restricted to L: each partial derivative becomes a
binary quadratic in the line parameters, and the span of those
quadratics has dimension 3 (generic, "first type") or 2 ("second
type").  Everything else here grows out of that matrix:

* the common tangent space (intersection of the tangent hyperplanes
  along L), which for a first-type line on a fourfold is a plane, the
  unique plane tangent to X along L;
* for second-type lines, the degree-2 Gauss restriction with its
  ramification form and the exchange involution of the two sheets;
* the residual construction: a plane tangent along L cuts X in L
  doubled plus one more line, and that residual line is computed
  exactly or numerically.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from fractions import Fraction
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .binaryform import BinaryFactorization, BinaryForm, factor_binary_form, wronskian
from .errors import (
    DegenerateLine,
    FlexPoint,
    IrrationalResult,
    NotOnCubic,
    NotSecondType,
    NotTangent,
    PlaneInCubic,
    SingularPoint,
)
from .exactmat import ExactMatrix
from .field import QOmega
from .lines import Line, NumericLine, Plane
from .multipoly import (
    MultiPoly,
    factor_quadratic_form,
    linear_divides,
    quadric_divides,
)


class LineType(str, Enum):
    FIRST = "first"
    SECOND = "second"


# -- restriction helpers ------------------------------------------------------


_INTERP_NODES = ((1, 0), (0, 1), (1, 1), (1, -1))

_HALF = QOmega(Fraction(1, 2))


def _integer_rows(line: Line) -> tuple[list, list, int]:
    """The two basis rows with denominators cleared, as (a, b) integer
    pairs standing for a + b*omega, plus the common scale factor used."""
    entries = list(line.rows[0]) + list(line.rows[1])
    lam = 1
    for e in entries:
        for den in (e.a.denominator, e.b.denominator):
            lam = lam * den // math.gcd(lam, den)
    rows = []
    for row in line.rows:
        rows.append(
            [
                (
                    e.a.numerator * (lam // e.a.denominator),
                    e.b.numerator * (lam // e.b.denominator),
                )
                for e in row
            ]
        )
    return rows[0], rows[1], lam


def _node_values(f: MultiPoly, line: Line, count: int) -> tuple[list, int]:
    """f at the first `count` interpolation nodes of the scaled-up line.

    All monomial products run on plain integer pairs; rational
    coefficients of f enter exactly once per term.  Each value equals
    lam**deg(f) times honest evaluation, with lam the returned scale.
    """
    r0, r1, lam = _integer_rows(line)
    den = 1
    for coeff in f.terms.values():
        for d in (coeff.a.denominator, coeff.b.denominator):
            den = den * d // math.gcd(den, d)
    iterms = [
        (
            exps,
            coeff.a.numerator * (den // coeff.a.denominator),
            coeff.b.numerator * (den // coeff.b.denominator),
        )
        for exps, coeff in f.terms.items()
    ]
    values = []
    for s, t in _INTERP_NODES[:count]:
        coords = [
            (s * a0 + t * a1, s * b0 + t * b1)
            for (a0, b0), (a1, b1) in zip(r0, r1)
        ]
        ax = ay = 0
        for exps, na, nb in iterms:
            x, y = 1, 0
            # integer pairs multiply by the same rule as QOmega: w^2 = w - 1
            for (cx, cy), e in zip(coords, exps):
                for _ in range(e):
                    x, y = x * cx - y * cy, x * cy + y * cx + y * cy
            ax += na * x - nb * y
            ay += na * y + nb * x + nb * y
        values.append(QOmega(Fraction(ax, den), Fraction(ay, den)))
    return values, lam


def _interpolated_restriction(f: MultiPoly, line: Line, d: int) -> BinaryForm:
    """Exact restriction to the line by point evaluation.

    A binary form of degree d is pinned down by its values at d+1
    parameter pairs, which costs a handful of term evaluations instead
    of a full polynomial substitution.
    """
    values, lam = _node_values(f, line, d + 1)
    if lam != 1:
        unscale = QOmega(Fraction(1, lam**d))
        values = [v * unscale for v in values]
    if d == 1:
        return BinaryForm(values)
    if d == 2:
        v10, v01, v11 = values
        return BinaryForm([v10, v11 - v10 - v01, v01])
    v10, v01, v11, vmm = values
    return BinaryForm(
        [v10, (v11 - vmm) * _HALF - v01, (v11 + vmm) * _HALF - v10, v01]
    )


def restrict_to_line(f: MultiPoly, line: Line) -> BinaryForm:
    """The binary cubic f(s*p + t*q) for the canonical basis (p, q) of L."""
    d = f.degree()
    if 1 <= d <= 3 and f.is_homogeneous():
        return _interpolated_restriction(f, line, d)
    g = f.restrict(line.rows)
    coeffs = [g.coefficient((d - k, k)) for k in range(d + 1)]
    return BinaryForm(coeffs)


def contains_line(f: MultiPoly, line: Line) -> bool:
    if f.degree() <= 3 and f.is_homogeneous():
        # a nonzero binary form of degree at most three cannot vanish at
        # four distinct parameter values (scaling does not move zeros)
        values, _ = _node_values(f, line, 4)
        return all(not v for v in values)
    return f.restrict(line.rows).is_zero()


def gradient_quadrics(f: MultiPoly, line: Line) -> List[BinaryForm]:
    """Each partial of f restricted to L, as a binary quadratic."""
    out = []
    zero3 = [QOmega.zero()] * 3
    for i in range(f.n_vars):
        g = f.partial(i)
        if g.is_zero():
            out.append(BinaryForm(zero3))
        elif g.degree() == 2 and g.is_homogeneous():
            out.append(_interpolated_restriction(g, line, 2))
        else:
            r = g.restrict(line.rows)
            out.append(
                BinaryForm(
                    [
                        r.coefficient((2, 0)),
                        r.coefficient((1, 1)),
                        r.coefficient((0, 2)),
                    ]
                )
            )
    return out


def gradient_matrix(f: MultiPoly, line: Line) -> ExactMatrix:
    """(n+1) x 3 matrix of restricted-gradient coefficients (s^2, st, t^2)."""
    return ExactMatrix([q.coeffs for q in gradient_quadrics(f, line)])


# -- classification -----------------------------------------------------------


def line_type(f: MultiPoly, line: Line) -> LineType:
    """Classify a line on a cubic as first or second type.

    Raises NotOnCubic when L is not contained in V(f) and SingularPoint
    when the restricted gradient has rank below 2, which forces a
    singular point of V(f) on L.
    """
    if not contains_line(f, line):
        raise NotOnCubic("the line does not lie on the cubic")
    rank = gradient_matrix(f, line).rank()
    if rank == 3:
        return LineType.FIRST
    if rank == 2:
        return LineType.SECOND
    raise SingularPoint(
        f"restricted gradient has rank {rank}; the cubic is singular along the line"
    )


def common_tangent_space(f: MultiPoly, line: Line) -> List[List[QOmega]]:
    """Basis of the intersection of all tangent hyperplanes T_x V(f), x on L.

    The result always contains the line itself (by the Euler relation);
    its dimension is (n+1) - rank of the restricted gradient.
    """
    if not contains_line(f, line):
        raise NotOnCubic("the line does not lie on the cubic")
    return gradient_matrix(f, line).transpose().kernel_basis()


def tangent_excess(f: MultiPoly, line: Line) -> int:
    """Projective dimension of (common tangent space) / L: 3 - rank."""
    return len(common_tangent_space(f, line)) - 2


@dataclass
class TangentSpan:
    """Solution space of the tangency condition for planes through a line.

    ``solution_basis`` spans the directions v for which the u-linear part
    of f(s*p + t*q + u*v) vanishes identically; it always contains the
    line.  ``quotient_dim`` is the dimension modulo the line's span: 1
    for a first-type line on a fourfold, 2 for second type.
    """

    ambient_dim: int
    solution_basis: List[List[QOmega]]
    quotient_dim: int


def tangent_spans(f: MultiPoly, line: Line) -> TangentSpan:
    basis = common_tangent_space(f, line)
    return TangentSpan(
        ambient_dim=f.n_vars - 1,
        solution_basis=basis,
        quotient_dim=len(basis) - 2,
    )


def unique_tangent_plane(f: MultiPoly, line: Line) -> Plane:
    """The one plane tangent to V(f) along a line whose tangent space is a P^2.

    A plane through L is tangent along all of L exactly when its third
    direction lies in the common tangent space, so a 3-dimensional
    common tangent space *is* the plane.  First-type lines on a cubic
    fourfold are the main case.  Raises NotTangent when the common
    tangent space is the line itself, and DegenerateLine when it is
    larger than a plane (the plane is then not unique).
    """
    basis = common_tangent_space(f, line)
    if len(basis) < 3:
        raise NotTangent("no plane is tangent along this line")
    if len(basis) > 3:
        raise DegenerateLine("a pencil of planes is tangent along this line")
    return Plane(basis)


# -- second-type structure ----------------------------------------------------


def second_type_pencil(f: MultiPoly, line: Line) -> Tuple[BinaryForm, BinaryForm]:
    """A canonical basis (Q1, Q2) of the rank-2 restricted-gradient pencil."""
    mat = gradient_matrix(f, line)
    rref, pivots = mat.rref()
    if len(pivots) != 2:
        raise NotSecondType(f"restricted gradient has rank {len(pivots)}, not 2")
    return BinaryForm(rref[0]), BinaryForm(rref[1])


@dataclass
class GaussRestriction:
    """The degree-2 data of the Gauss map on a second-type line.

    ``ramification`` is the binary quadratic whose roots are the two
    ramification parameters; ``involution`` is the exact 2x2 traceless
    matrix exchanging the sheets, acting on (s, t) as a column.
    """

    pencil: Tuple[BinaryForm, BinaryForm]
    ramification: BinaryForm
    factorization: BinaryFactorization
    involution: Tuple[Tuple[QOmega, QOmega], Tuple[QOmega, QOmega]]

    def ramification_points(self, line: Line) -> List[List[QOmega]]:
        """Ambient coordinates of the ramification points, when exact."""
        return [line.point(s, t) for (s, t) in self.factorization.root_points()]

    def apply_involution(self, s, t) -> Tuple[QOmega, QOmega]:
        (m00, m01), (m10, m11) = self.involution
        s, t = QOmega.coerce(s), QOmega.coerce(t)
        return (m00 * s + m01 * t, m10 * s + m11 * t)


def gauss_restriction(f: MultiPoly, line: Line) -> GaussRestriction:
    """Ramification form and sheet involution of the Gauss map on L.

    Writing the pencil as Q1, Q2 and P_ij for the 2x2 minors of their
    coefficient matrix, the parameters with equal Gauss image satisfy
    the symmetric bilinear form P01*s*s' + P02*(s*t' + t*s') + P12*t*t',
    whose diagonal is (half) the Wronskian of the pencil.
    """
    q1, q2 = second_type_pencil(f, line)
    a, b = q1.coeffs, q2.coeffs
    p01 = a[0] * b[1] - a[1] * b[0]
    p02 = a[0] * b[2] - a[2] * b[0]
    p12 = a[1] * b[2] - a[2] * b[1]
    ram = wronskian(q1, q2)
    if ram.is_zero():
        raise SingularPoint("the gradient pencil is degenerate along the line")
    involution = ((p02, p12), (-p01, -p02))
    return GaussRestriction(
        pencil=(q1, q2),
        ramification=ram,
        factorization=factor_binary_form(ram),
        involution=involution,
    )


def gauss_ramification(f: MultiPoly, line: Line) -> Tuple[List[QOmega], List[QOmega]]:
    """The two points of a second-type line where the Gauss map ramifies.

    These are the roots of the Wronskian of the restricted-gradient
    pencil.  Raises IrrationalResult when the roots do not lie in Q(w)
    (they do for all the structured lines this package constructs).
    """
    data = gauss_restriction(f, line)
    if not data.factorization.is_complete():
        raise IrrationalResult("ramification parameters are not in Q(w)")
    points: List[List[QOmega]] = []
    for (s, t), mult in data.factorization.roots:
        points.extend([line.point(s, t)] * mult)
    assert len(points) == 2
    return points[0], points[1]


def certify_two_to_one(f: MultiPoly, line: Line, samples: int = 5) -> bool:
    """Exact spot-check that the Gauss map identifies involution pairs.

    At rational parameters: the full gradient at (s, t) and at the
    involution image must be proportional, i.e. the 2 x (n+1) matrix of
    the two gradients has rank 1.
    """
    data = gauss_restriction(f, line)
    grads = f.gradient()
    checked = 0
    k = 0
    while checked < samples:
        k += 1
        s, t = QOmega.coerce(k), QOmega.one()
        s2, t2 = data.apply_involution(s, t)
        if not s2 and not t2:
            continue
        x = line.point(s, t)
        y = line.point(s2, t2)
        rows = [[g.evaluate(x) for g in grads], [g.evaluate(y) for g in grads]]
        if ExactMatrix(rows).rank() != 1:
            return False
        checked += 1
    return True


# -- the residual-line construction -------------------------------------------


@dataclass
class ResidualLine:
    """Residual intersection of a plane tangent to the cubic along a line.

    ``kind`` is "line" when the plane section is 2L + (another line) and
    "triple" when the section is 3L, in which case ``line`` is L itself.
    """

    kind: str
    line: Line


def _plane_third_direction(plane: Plane, line: Line) -> List[QOmega]:
    for row in plane.rows:
        if ExactMatrix(list(line.rows) + [row]).rank() == 3:
            return row
    raise DegenerateLine("plane does not properly contain the line")


def residual_line(f: MultiPoly, line: Line, plane: Plane) -> ResidualLine:
    """The residual line of a plane tangent to V(f) along a contained line.

    Restricting f to coordinates (s, t, u) adapted to L inside the
    plane, tangency along L means the u^1 part vanishes, so that
    f = u^2 * (lambda(s,t) + c*u); the residual is the vanishing line of
    the trailing factor.  Raises PlaneInCubic when f vanishes on the
    whole plane and NotTangent when the plane is not tangent along L.
    """
    if not contains_line(f, line):
        raise NotOnCubic("the line does not lie on the cubic")
    if not plane.contains_line(line):
        raise DegenerateLine("the plane does not contain the line")
    v = _plane_third_direction(plane, line)
    basis = [line.rows[0], line.rows[1], v]
    g = f.restrict(basis)
    if g.is_zero():
        raise PlaneInCubic("the cubic vanishes on the whole plane")
    # split by u-degree: g = C(s,t) + u Q(s,t) + u^2 lambda(s,t) + u^3 c
    for exps, coeff in g.terms.items():
        if exps[2] == 0 and coeff:
            raise NotOnCubic("restriction carries a u-free term; L is not on V(f)")
        if exps[2] == 1 and coeff:
            raise NotTangent("the plane is not tangent along the line")
    alpha = g.coefficient((1, 0, 2))
    beta = g.coefficient((0, 1, 2))
    gamma = g.coefficient((0, 0, 3))
    if not alpha and not beta:
        return ResidualLine(kind="triple", line=line)
    # solutions of alpha*s + beta*t + gamma*u = 0 in the plane
    if alpha:
        inner = [
            [-beta / alpha, QOmega.one(), QOmega.zero()],
            [-gamma / alpha, QOmega.zero(), QOmega.one()],
        ]
    else:
        inner = [
            [QOmega.one(), QOmega.zero(), QOmega.zero()],
            [QOmega.zero(), -gamma / beta, QOmega.one()],
        ]
    ambient = [
        [
            sum((c * basis[j][i] for j, c in enumerate(vec)), QOmega.zero())
            for i in range(f.n_vars)
        ]
        for vec in inner
    ]
    return ResidualLine(kind="line", line=Line(ambient))


def tangent_planes_pencil(f: MultiPoly, line: Line) -> List[Plane]:
    """For exploration: planes span(L, v) over basis directions v of the
    common tangent space that are independent of L."""
    basis = common_tangent_space(f, line)
    planes = []
    for v in basis:
        if ExactMatrix(list(line.rows) + [v]).rank() == 3:
            planes.append(Plane(list(line.rows) + [v]))
    return planes


@dataclass
class LineIntersection:
    """Intersection of a line with a hypersurface V(g).

    ``infinite`` flags L inside V(g).  Otherwise ``points`` lists
    (point, multiplicity) pairs; coordinates are exact QOmega vectors
    when every root of the restricted form lies in Q(w) (``exact`` is
    True) and complex vectors found numerically otherwise.
    """

    infinite: bool
    exact: bool = True
    points: List[Tuple[Sequence, int]] = None  # type: ignore[assignment]

    def distinct_count(self) -> Optional[int]:
        return None if self.infinite else len(self.points)


def intersect_line_hypersurface(g: MultiPoly, line: Line) -> LineIntersection:
    """All points of L on V(g), with multiplicities summing to deg g."""
    restriction = f_restrict_binary(g, line)
    if restriction.is_zero():
        return LineIntersection(infinite=True, points=[])
    fact = factor_binary_form(restriction)
    if fact.is_complete():
        pts = [(line.point(s, t), m) for (s, t), m in fact.roots]
        return LineIntersection(infinite=False, exact=True, points=pts)
    # fall back to numeric roots for the unresolved part, keeping exact ones
    pts = [(line.point(s, t), m) for (s, t), m in fact.roots]
    numeric = []
    row0 = np.array([v.to_complex() for v in line.rows[0]])
    row1 = np.array([v.to_complex() for v in line.rows[1]])
    for s, t in fact.unresolved.roots_complex():
        numeric.append((s * row0 + t * row1, 1))
    return LineIntersection(infinite=False, exact=False, points=pts + numeric)


def f_restrict_binary(g: MultiPoly, line: Line) -> BinaryForm:
    """Restriction of a homogeneous g of any degree to L as a binary form."""
    d = g.degree()
    if 1 <= d <= 3 and g.is_homogeneous():
        return _interpolated_restriction(g, line, d)
    r = g.restrict(line.rows)
    return BinaryForm([r.coefficient((d - k, k)) for k in range(d + 1)])


@dataclass
class PointLineSystem:
    """The direction-space system whose zeros are lines through a point.

    Directions live in the tangent hyperplane at x modulo x itself;
    ``basis`` maps direction coordinates back to ambient ones.  A
    direction u gives a line through x exactly when both the quadric
    (the polar of x) and the cubic vanish at it.
    """

    point: List[QOmega]
    basis: List[List[QOmega]]
    quadric: MultiPoly
    cubic: MultiPoly

    def line_through(self, direction: Sequence) -> Line:
        dir_ambient = [
            sum(
                (QOmega.coerce(direction[j]) * self.basis[j][i] for j in range(len(self.basis))),
                QOmega.zero(),
            )
            for i in range(len(self.point))
        ]
        return Line([self.point, dir_ambient])


def lines_through_point_system(f: MultiPoly, x: Sequence) -> PointLineSystem:
    """Quadric + cubic in direction space cutting out the lines through x.

    The line spanned by x and a tangent direction y lies on V(f) iff
    the polar quadric of x and f itself vanish at y; restricting both to
    a basis of (tangent hyperplane mod x) gives a (2,3) system in a
    projective space of dimension n-1.
    """
    x = [QOmega.coerce(v) for v in x]
    if f.evaluate(x):
        raise NotOnCubic("point is not on the cubic")
    grad_row = [g.evaluate(x) for g in f.gradient()]
    if not any(grad_row):
        raise SingularPoint("point is singular on the cubic")
    hyper = ExactMatrix([grad_row]).kernel_basis()
    # quotient by x: x lies in its own tangent hyperplane (Euler); drop the
    # basis vector whose pivot coordinate carries x's leading entry
    reduced = _quotient_basis(hyper, x)
    return PointLineSystem(
        point=x,
        basis=reduced,
        quadric=f.polar(x).restrict(reduced),
        cubic=f.restrict(reduced),
    )


def _quotient_basis(basis: List[List[QOmega]], x: List[QOmega]) -> List[List[QOmega]]:
    """Vectors of span(basis) completing x to a basis of it (greedy picks)."""
    picked: List[List[QOmega]] = [list(x)]
    out: List[List[QOmega]] = []
    rank = 1
    for b in basis:
        if ExactMatrix(picked + [list(b)]).rank() > rank:
            picked.append(list(b))
            out.append(list(b))
            rank += 1
    if len(out) != len(basis) - 1:
        raise DegenerateLine("marked point does not lie in the given span")
    return out


def eckardt_test(f: MultiPoly, x: Sequence) -> bool:
    """Is x a cone point (infinitely many lines of V(f) through x)?

    Decided exactly on the direction-space system: the quadric and the
    cubic share a positive-dimensional component iff the quadric
    vanishes identically, divides the cubic, or has a linear factor
    over Q(w) dividing the cubic.
    """
    system = lines_through_point_system(f, x)
    q, c = system.quadric, system.cubic
    if q.is_zero():
        return True
    if quadric_divides(q, c):
        return True
    split = factor_quadratic_form(q)
    if split is None:
        return False
    return any(linear_divides(lin, c) for lin in split if not lin.is_zero())


# -- pointwise constructions --------------------------------------------------


def tangent_residual_point(f: MultiPoly, p: Sequence, q: Sequence) -> List[QOmega]:
    """Third intersection of V(f) with a line tangent to it at p.

    The line through p and q must meet V(f) doubly at p (q in the
    tangent hyperplane at p).  Raises FlexPoint when the contact is
    triple and the residual point falls back onto p.
    """
    p = [QOmega.coerce(v) for v in p]
    q = [QOmega.coerce(v) for v in q]
    if f.evaluate(p):
        raise NotOnCubic("base point is not on the cubic")
    grads = f.gradient()
    c1 = sum((QOmega.coerce(qi) * g.evaluate(p) for qi, g in zip(q, grads)), QOmega.zero())
    if c1:
        raise NotTangent("the line is not tangent at the base point")
    c2 = sum((pi * g.evaluate(q) for pi, g in zip(p, grads)), QOmega.zero())
    c3 = f.evaluate(q)
    if not c2:
        if not c3:
            raise DegenerateLine("the whole line lies on the cubic")
        raise FlexPoint("triple contact: the residual point is the base point")
    return [(-c3) * pi + c2 * qi for pi, qi in zip(p, q)]


def is_eckardt_point(f: MultiPoly, x: Sequence) -> bool:
    """Does the tangent hyperplane cut V(f) in a cone with vertex x?

    Splitting the restriction of f to the tangent hyperplane H along
    x as u*Q + C (no u^2 or u^3 terms survive for x on V(f) with H
    tangent), the section is a cone with vertex x exactly when the
    polar quadric Q of x vanishes identically on H.
    """
    x = [QOmega.coerce(v) for v in x]
    if f.evaluate(x):
        raise NotOnCubic("point is not on the cubic")
    grad_row = [g.evaluate(x) for g in f.gradient()]
    if not any(grad_row):
        raise SingularPoint("point is singular on the cubic")
    hyperplane = ExactMatrix([grad_row]).kernel_basis()
    polar = f.polar(x)
    return polar.restrict(hyperplane).is_zero()


# -- numeric twins -------------------------------------------------------------


def gradient_matrix_numeric(f: MultiPoly, rows) -> np.ndarray:
    """(n+1) x 3 complex matrix of restricted-gradient coefficients."""
    basis = np.asarray(rows, dtype=complex)
    out = np.zeros((f.n_vars, 3), dtype=complex)
    for i in range(f.n_vars):
        coeffs = f.partial(i).restrict_complex(basis)
        out[i, 0] = coeffs.get((2, 0), 0j)
        out[i, 1] = coeffs.get((1, 1), 0j)
        out[i, 2] = coeffs.get((0, 2), 0j)
    return out


def contains_line_numeric(f: MultiPoly, rows, tol: float = 1e-8) -> bool:
    basis = np.asarray(rows, dtype=complex)
    scale = max(np.linalg.norm(basis[0]), np.linalg.norm(basis[1])) ** f.degree()
    coeffs = f.restrict_complex(basis)
    worst = max((abs(v) for v in coeffs.values()), default=0.0)
    return worst <= tol * max(scale, 1.0)


def line_type_numeric(
    f: MultiPoly,
    rows,
    tol_second: float = 1e-6,
    tol_first: float = 1e-3,
) -> Tuple[Optional[LineType], float]:
    """Classify numerically via singular values of the gradient matrix.

    Returns (type, s3/s1).  The type is None in the ambiguous band
    between ``tol_second`` and ``tol_first``; callers should treat that
    as a refusal, not a verdict.
    """
    basis = np.asarray(rows, dtype=complex)
    q, _ = np.linalg.qr(basis.T)
    mat = gradient_matrix_numeric(f, q.T)
    s = np.linalg.svd(mat, compute_uv=False)
    ratio = float(s[2] / s[0]) if s[0] > 0 else 0.0
    if ratio < tol_second:
        return LineType.SECOND, ratio
    if ratio > tol_first:
        return LineType.FIRST, ratio
    return None, ratio


def common_tangent_space_numeric(f: MultiPoly, rows, rank: int) -> np.ndarray:
    """Orthonormal basis (rows) of the numeric common tangent space."""
    mat = gradient_matrix_numeric(f, rows)
    _, _, vh = np.linalg.svd(mat.T)
    return vh[rank:].conj()


def residual_line_numeric(
    f: MultiPoly,
    line_rows,
    third: Sequence[complex],
    tol_tangent: float = 1e-6,
) -> Tuple[NumericLine, float]:
    """Numeric residual line of the plane spanned by a line and one more point.

    Returns the residual line and the tangency defect (largest stray
    coefficient of u-degree < 2, relative to the u^2/u^3 scale).  A
    defect above ``tol_tangent`` raises NotTangent.
    """
    w = np.asarray(line_rows[0], dtype=complex)
    z = np.asarray(line_rows[1], dtype=complex)
    p = np.asarray(third, dtype=complex)
    basis = np.vstack([w / np.linalg.norm(w), z / np.linalg.norm(z), p / np.linalg.norm(p)])
    coeffs = f.restrict_complex(basis)
    lead = max(
        abs(coeffs.get((1, 0, 2), 0j)),
        abs(coeffs.get((0, 1, 2), 0j)),
        abs(coeffs.get((0, 0, 3), 0j)),
    )
    total = max((abs(v) for v in coeffs.values()), default=0.0)
    if total < 1e-12:
        raise PlaneInCubic("the cubic vanishes on the whole plane")
    stray = max(
        (abs(v) for e, v in coeffs.items() if e[2] < 2), default=0.0
    )
    defect = stray / total
    if defect > tol_tangent:
        raise NotTangent(f"plane is not tangent along the line (defect {defect:.2e})")
    if lead < 1e-6 * total:
        raise PlaneInCubic("residual direction is numerically undefined")
    alpha = coeffs.get((1, 0, 2), 0j)
    beta = coeffs.get((0, 1, 2), 0j)
    gamma = coeffs.get((0, 0, 3), 0j)
    if abs(alpha) >= abs(beta):
        inner = np.array([[-beta / alpha, 1.0, 0.0], [-gamma / alpha, 0.0, 1.0]])
    else:
        inner = np.array([[1.0, -alpha / beta, 0.0], [0.0, -gamma / beta, 1.0]])
    return NumericLine(inner @ basis), defect
