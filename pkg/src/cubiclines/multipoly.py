"""Sparse multivariate polynomials over Q(w).

A polynomial is a dict from exponent tuples to nonzero QOmega
coefficients.  Everything this package does symbolically is a form of
degree at most 3 in at most 7 variables, so the representation favours
clarity over asymptotics.  Restriction to a parametrized linear subspace
(`restrict`) is the workhorse: it is how cubics get pulled back to lines
and planes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .errors import DimensionMismatch
from .field import QOmega

Exponent = Tuple[int, ...]
TermMap = Dict[Exponent, QOmega]


class MultiPoly:
    """Immutable sparse polynomial in ``n_vars`` variables over Q(w)."""

    __slots__ = ("n_vars", "terms")

    def __init__(self, n_vars: int, terms: Mapping[Exponent, QOmega] | None = None):
        clean: TermMap = {}
        for exps, coeff in (terms or {}).items():
            if len(exps) != n_vars:
                raise DimensionMismatch(
                    f"exponent tuple {exps} does not have {n_vars} entries"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coeff = QOmega.coerce(coeff)
            if coeff:
                clean[tuple(exps)] = coeff
        object.__setattr__(self, "n_vars", n_vars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n_vars: int) -> "MultiPoly":
        return cls(n_vars, {})

    @classmethod
    def constant(cls, n_vars: int, value) -> "MultiPoly":
        return cls(n_vars, {(0,) * n_vars: QOmega.coerce(value)})

    @classmethod
    def variable(cls, n_vars: int, index: int) -> "MultiPoly":
        exps = [0] * n_vars
        exps[index] = 1
        return cls(n_vars, {tuple(exps): QOmega.one()})

    @classmethod
    def linear_form(cls, coeffs: Sequence) -> "MultiPoly":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            exps = [0] * n
            exps[i] = 1
            terms[tuple(exps)] = QOmega.coerce(c)
        return cls(n, terms)

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degrees = {sum(e) for e in self.terms}
        return len(degrees) <= 1

    def coefficient(self, exps: Exponent) -> QOmega:
        return self.terms.get(tuple(exps), QOmega.zero())

    # -- arithmetic -----------------------------------------------------------

    def _require_same_vars(self, other: "MultiPoly") -> None:
        if self.n_vars != other.n_vars:
            raise DimensionMismatch(
                f"{self.n_vars}-variable and {other.n_vars}-variable polynomials"
            )

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._require_same_vars(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            terms[exps] = terms.get(exps, QOmega.zero()) + coeff
        return MultiPoly(self.n_vars, terms)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.n_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            scalar = QOmega.coerce(other)
            return MultiPoly(
                self.n_vars, {e: c * scalar for e, c in self.terms.items()}
            )
        self._require_same_vars(other)
        terms: TermMap = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                terms[exps] = terms.get(exps, QOmega.zero()) + c1 * c2
        return MultiPoly(self.n_vars, terms)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.n_vars == other.n_vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.n_vars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"MultiPoly.zero({self.n_vars})"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            coeff = self.terms[exps]
            mono = "*".join(
                f"x{i}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(exps)
                if e
            )
            parts.append(f"({coeff.a}+{coeff.b}w){mono or '1'}")
        return " + ".join(parts)

    # -- calculus -------------------------------------------------------------

    def partial(self, index: int) -> "MultiPoly":
        """Partial derivative with respect to variable ``index``."""
        terms: TermMap = {}
        for exps, coeff in self.terms.items():
            e = exps[index]
            if not e:
                continue
            lowered = list(exps)
            lowered[index] = e - 1
            key = tuple(lowered)
            terms[key] = terms.get(key, QOmega.zero()) + coeff * e
        return MultiPoly(self.n_vars, terms)

    def gradient(self) -> list["MultiPoly"]:
        return [self.partial(i) for i in range(self.n_vars)]

    # -- evaluation -------------------------------------------------------------

    def evaluate(self, point: Sequence) -> QOmega:
        """Exact evaluation at a point of QOmega (or coercible) entries."""
        if len(point) != self.n_vars:
            raise DimensionMismatch("point length does not match variable count")
        pt = [QOmega.coerce(v) for v in point]
        total = QOmega.zero()
        for exps, coeff in self.terms.items():
            value = coeff
            for v, e in zip(pt, exps):
                for _ in range(e):
                    value = value * v
            total = total + value
        return total

    def evaluate_complex(self, point: Sequence[complex]) -> complex:
        if len(point) != self.n_vars:
            raise DimensionMismatch("point length does not match variable count")
        total = 0j
        for exps, coeff in self.terms.items():
            value = coeff.to_complex()
            for v, e in zip(point, exps):
                if e:
                    value *= v**e
            total += value
        return total

    def polar(self, point: Sequence) -> "MultiPoly":
        """sum_i point_i * (d f / d x_i): the first polar of f at ``point``."""
        pt = [QOmega.coerce(v) for v in point]
        if len(pt) != self.n_vars:
            raise DimensionMismatch("point length does not match variable count")
        total = MultiPoly.zero(self.n_vars)
        for i, c in enumerate(pt):
            if c:
                total = total + self.partial(i) * c
        return total

    # -- restriction to linear subspaces ---------------------------------------

    def restrict(self, basis: Sequence[Sequence]) -> "MultiPoly":
        """Pull back along the linear map u -> sum_j u_j * basis[j].

        ``basis`` is a sequence of k vectors of length n_vars; the result
        is a polynomial in k new variables.  Substituting a single vector
        (k = 1) evaluates f on a punctured line through the origin.
        """
        k = len(basis)
        rows = []
        for row in basis:
            if len(row) != self.n_vars:
                raise DimensionMismatch("basis vector length != variable count")
            rows.append([QOmega.coerce(v) for v in row])
        # linear forms L_i(u) = sum_j basis[j][i] u_j, one per old variable
        lin: list[MultiPoly] = []
        for i in range(self.n_vars):
            lin.append(
                MultiPoly.linear_form([rows[j][i] for j in range(k)])
            )
        result = MultiPoly.zero(k)
        for exps, coeff in self.terms.items():
            term = MultiPoly.constant(k, coeff)
            for i, e in enumerate(exps):
                for _ in range(e):
                    term = term * lin[i]
            result = result + term
        return result

    def restrict_complex(self, basis) -> Dict[Exponent, complex]:
        """Numeric restriction: basis is a (k, n_vars) complex array-like.

        Returns a dict of complex coefficients in k variables (terms below
        1e-300 magnitude are dropped).
        """
        rows = [list(map(complex, row)) for row in basis]
        k = len(rows)
        for row in rows:
            if len(row) != self.n_vars:
                raise DimensionMismatch("basis vector length != variable count")
        result: Dict[Exponent, complex] = {}
        for exps, coeff in self.terms.items():
            partial: Dict[Exponent, complex] = {(0,) * k: coeff.to_complex()}
            for i, e in enumerate(exps):
                for _ in range(e):
                    nxt: Dict[Exponent, complex] = {}
                    for mono, val in partial.items():
                        for j in range(k):
                            c = rows[j][i]
                            if c == 0:
                                continue
                            key = tuple(
                                m + (1 if jj == j else 0)
                                for jj, m in enumerate(mono)
                            )
                            nxt[key] = nxt.get(key, 0j) + val * c
                    partial = nxt
            for mono, val in partial.items():
                result[mono] = result.get(mono, 0j) + val
        return {m: v for m, v in result.items() if abs(v) > 1e-300}

    # -- serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for exps in sorted(self.terms):
            coeff = self.terms[exps]
            terms.append({"exps": list(exps), "a": str(coeff.a), "b": str(coeff.b)})
        return {"n_vars": self.n_vars, "terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "MultiPoly":
        terms = {}
        for item in data["terms"]:
            exps = tuple(item["exps"])
            terms[exps] = QOmega(Fraction(item["a"]), Fraction(item["b"]))
        return cls(data["n_vars"], terms)


def poly_restrict(f: MultiPoly, basis: Sequence[Sequence]) -> MultiPoly:
    """Functional alias for :meth:`MultiPoly.restrict`."""
    return f.restrict(basis)


# -- divisibility helpers used by the Eckardt test ------------------------------


def linear_divides(linear: MultiPoly, g: MultiPoly) -> bool:
    """Does the linear form divide g?  Checked by restricting g to ker(linear)."""
    from .exactmat import ExactMatrix

    if linear.degree() > 1 or linear.is_zero():
        raise ValueError("expected a nonzero linear form")
    coeffs = [linear.coefficient(_unit(linear.n_vars, i)) for i in range(linear.n_vars)]
    kernel = ExactMatrix([coeffs]).kernel_basis()
    return g.restrict(kernel).is_zero()


def quadric_divides(q: MultiPoly, g: MultiPoly) -> bool:
    """Does the quadratic form q divide the cubic form g (exactly)?

    Solves g = q * L for an unknown linear form L by exact linear algebra
    and verifies the product.
    """
    from .exactmat import ExactMatrix

    if q.is_zero():
        return g.is_zero()
    n = q.n_vars
    monomials = sorted(set(g.terms) | {_add(e, _unit(n, j)) for e in q.terms for j in range(n)})
    rows = []
    rhs = []
    for mono in monomials:
        row = []
        for j in range(n):
            shifted = _sub(mono, _unit(n, j))
            row.append(q.coefficient(shifted) if shifted is not None else QOmega.zero())
        rows.append(row)
        rhs.append(g.coefficient(mono))
    solution = ExactMatrix(rows).solve(rhs)
    if solution is None:
        return False
    candidate = q * MultiPoly.linear_form(solution)
    return candidate == g


def factor_quadratic_form(q: MultiPoly):
    """Split a quadratic form into two linear factors over Q(w), if possible.

    Returns (L1, L2) with q = L1 * L2, or None when no such factorization
    exists over the field (rank >= 3, or the needed square root is not in
    Q(w)).
    """
    n = q.n_vars
    if q.is_zero() or q.degree() != 2:
        raise ValueError("expected a nonzero quadratic form")
    pivot = None
    for i in range(n):
        if q.coefficient(_scale_unit(n, i, 2)):
            pivot = i
            break
    if pivot is None:
        # no square terms: q = x_i * B + C with C free of x_i
        for i in range(n):
            if any(e[i] for e in q.terms):
                pivot = i
                break
        assert pivot is not None
        b_terms, c_terms = {}, {}
        for exps, coeff in q.terms.items():
            if exps[pivot]:
                lowered = list(exps)
                lowered[pivot] -= 1
                b_terms[tuple(lowered)] = coeff
            else:
                c_terms[exps] = coeff
        B = MultiPoly(n, b_terms)
        C = MultiPoly(n, c_terms)
        if C.is_zero():
            return MultiPoly.variable(n, pivot), B
        T = _divide_linear(C, B)
        if T is None:
            return None
        return B, MultiPoly.variable(n, pivot) + T
    # q = A x_p^2 + B x_p + C, quadratic formula with an exact sqrt
    A = q.coefficient(_scale_unit(n, pivot, 2))
    b_terms, c_terms = {}, {}
    for exps, coeff in q.terms.items():
        e = exps[pivot]
        if e == 2:
            continue
        if e == 1:
            lowered = list(exps)
            lowered[pivot] = 0
            b_terms[tuple(lowered)] = coeff
        else:
            c_terms[exps] = coeff
    B = MultiPoly(n, b_terms)
    C = MultiPoly(n, c_terms)
    disc = B * B - 4 * A * C
    root = _sqrt_of_square_form(disc)
    if root is None:
        return None
    xp = MultiPoly.variable(n, pivot)
    inv4a = (QOmega.coerce(4) * A).inverse()
    L1 = 2 * A * xp + B + root
    L2 = 2 * A * xp + B - root
    assert inv4a * (L1 * L2) == q
    return inv4a * L1, L2


def _sqrt_of_square_form(d: MultiPoly):
    """If d is the square of a linear form over Q(w), return that form."""
    if d.is_zero():
        return MultiPoly.zero(d.n_vars)
    if d.degree() != 2:
        return None
    n = d.n_vars
    for j in range(n):
        djj = d.coefficient(_scale_unit(n, j, 2))
        if not djj:
            continue
        c = djj.sqrt()
        if c is None:
            return None
        # candidate L with L_j = c and L_k = coeff(x_j x_k) / (2 c)
        coeffs = []
        for k in range(n):
            if k == j:
                coeffs.append(c)
            else:
                cross = d.coefficient(_add(_unit(n, j), _unit(n, k)))
                coeffs.append(cross / (2 * c))
        cand = MultiPoly.linear_form(coeffs)
        if cand * cand == d:
            return cand
        return None
    return None


def _divide_linear(num: MultiPoly, den: MultiPoly):
    """num / den for linear den when the quotient is a linear form, else None."""
    from .exactmat import ExactMatrix

    n = num.n_vars
    monomials = sorted(
        set(num.terms) | {_add(e1, _unit(n, j)) for e1 in den.terms for j in range(n)}
    )
    rows, rhs = [], []
    for mono in monomials:
        row = []
        for j in range(n):
            shifted = _sub(mono, _unit(n, j))
            row.append(den.coefficient(shifted) if shifted is not None else QOmega.zero())
        rows.append(row)
        rhs.append(num.coefficient(mono))
    solution = ExactMatrix(rows).solve(rhs)
    if solution is None:
        return None
    cand = MultiPoly.linear_form(solution)
    return cand if den * cand == num else None


def _unit(n: int, i: int) -> Exponent:
    return tuple(1 if j == i else 0 for j in range(n))


def _scale_unit(n: int, i: int, e: int) -> Exponent:
    return tuple(e if j == i else 0 for j in range(n))


def _add(e1: Exponent, e2: Exponent) -> Exponent:
    return tuple(a + b for a, b in zip(e1, e2))


def _sub(e1: Exponent, e2: Exponent):
    out = tuple(a - b for a, b in zip(e1, e2))
    return None if any(v < 0 for v in out) else out
