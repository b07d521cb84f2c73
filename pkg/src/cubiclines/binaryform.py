"""Binary forms F(s, t) over Q(w) and their roots on the projective line.

Coefficients are stored densely: ``coeffs[k]`` multiplies s^(d-k) t^k.
Exact root extraction handles everything this package needs — monomial
roots, linear and quadratic factors (square roots taken in the field),
and binomial cubics a*s^3 + b*t^3 (cube roots in the field, then the
three cube roots of unity).  Whatever cannot be split over Q(w) is
returned untouched as an ``unresolved`` remainder so callers can decide
between failing loudly and switching to numerics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ZeroForm
from .field import CUBE_ROOTS_OF_UNITY, QOmega

ProjPoint = Tuple[QOmega, QOmega]  # [s : t]


class BinaryForm:
    """Homogeneous polynomial in two variables s, t over Q(w)."""

    def __init__(self, coeffs: Sequence):
        self.coeffs: List[QOmega] = [QOmega.coerce(c) for c in coeffs]
        if not self.coeffs:
            raise ZeroForm("a binary form needs at least one coefficient")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def evaluate(self, s, t) -> QOmega:
        s, t = QOmega.coerce(s), QOmega.coerce(t)
        d = self.degree
        total = QOmega.zero()
        for k, c in enumerate(self.coeffs):
            if c:
                total = total + c * s ** (d - k) * t**k
        return total

    def derivative_s(self) -> "BinaryForm":
        d = self.degree
        if d == 0:
            return BinaryForm([QOmega.zero()])
        return BinaryForm([self.coeffs[k] * (d - k) for k in range(d)])

    def derivative_t(self) -> "BinaryForm":
        d = self.degree
        if d == 0:
            return BinaryForm([QOmega.zero()])
        return BinaryForm([self.coeffs[k] * k for k in range(1, d + 1)])

    def __mul__(self, other) -> "BinaryForm":
        if isinstance(other, BinaryForm):
            out = [QOmega.zero()] * (self.degree + other.degree + 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return BinaryForm(out)
        scalar = QOmega.coerce(other)
        return BinaryForm([c * scalar for c in self.coeffs])

    __rmul__ = __mul__

    def __sub__(self, other: "BinaryForm") -> "BinaryForm":
        d = max(self.degree, other.degree)
        a = [QOmega.zero()] * (d - self.degree) + self.coeffs
        b = [QOmega.zero()] * (d - other.degree) + other.coeffs
        return BinaryForm([x - y for x, y in zip(a, b)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryForm):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self) -> str:
        return f"BinaryForm({[(str(c.a), str(c.b)) for c in self.coeffs]})"

    def divide_root(self, root: ProjPoint) -> "BinaryForm":
        """Divide out the linear factor (t0*s - s0*t) for root [s0 : t0]."""
        s0, t0 = root
        d = self.degree
        if t0:
            # synthetic division by (s - x t) with x = s0/t0, then scale by t0
            x = s0 / t0
            out = [self.coeffs[0]]
            for k in range(1, d):
                out.append(self.coeffs[k] + out[-1] * x)
            rem = self.coeffs[d] + out[-1] * x
            if rem:
                raise ZeroForm("claimed root does not annihilate the form")
            return BinaryForm([c / t0 for c in out])
        # root [1 : 0]: form is divisible by t
        if self.coeffs[0]:
            raise ZeroForm("claimed root does not annihilate the form")
        return BinaryForm([c * (-(QOmega.one())) / s0 for c in self.coeffs[1:]])

    def roots_complex(self) -> List[Tuple[complex, complex]]:
        """All degree-many roots [s : t] numerically, repetitions included."""
        if self.is_zero():
            raise ZeroForm("the zero form vanishes identically")
        c = [x.to_complex() for x in self.coeffs]
        lead = 0
        while lead < len(c) and self.coeffs[lead].is_zero():
            lead += 1
        roots = [(1.0 + 0j, 0j)] * lead
        tail = c[lead:]
        if len(tail) > 1:
            for x in np.roots(tail):
                norm = (abs(x) ** 2 + 1.0) ** 0.5
                roots.append((complex(x) / norm, 1.0 / norm))
        return roots


@dataclass
class BinaryFactorization:
    """Outcome of exact root hunting on a binary form.

    ``roots`` pairs each projective root with its multiplicity;
    ``unresolved`` is a form with no roots in Q(w) that this code can
    certify (None when the factorization is complete).
    """

    degree: int
    roots: List[Tuple[ProjPoint, int]] = field(default_factory=list)
    unresolved: Optional[BinaryForm] = None

    def is_complete(self) -> bool:
        return self.unresolved is None

    def root_points(self) -> List[ProjPoint]:
        return [r for r, _ in self.roots]


def _normalize_root(s: QOmega, t: QOmega) -> ProjPoint:
    if t:
        return (s / t, QOmega.one())
    return (QOmega.one(), QOmega.zero())


def factor_binary_form(form: BinaryForm) -> BinaryFactorization:
    """Split off every root of ``form`` that lives in Q(w).

    Handles monomial roots at [1:0] and [0:1], then linear and quadratic
    remainders, then binomial cubics.  Anything else is reported as
    unresolved rather than guessed at.
    """
    if form.is_zero():
        raise ZeroForm("cannot factor the zero form")
    counts: dict = {}

    def record(pt: ProjPoint) -> None:
        counts[pt] = counts.get(pt, 0) + 1

    current = form
    while True:
        d = current.degree
        if d == 0:
            break
        if not current.coeffs[0]:
            record((QOmega.one(), QOmega.zero()))
            current = BinaryForm(current.coeffs[1:])
            continue
        if not current.coeffs[d]:
            record((QOmega.zero(), QOmega.one()))
            current = BinaryForm(current.coeffs[:d])
            continue
        if d == 1:
            record(_normalize_root(-current.coeffs[1], current.coeffs[0]))
            current = BinaryForm([QOmega.one()])
            continue
        if d == 2:
            a, b, c = current.coeffs
            disc = b * b - 4 * a * c
            root = disc.sqrt()
            if root is None:
                return BinaryFactorization(
                    form.degree, sorted_roots(counts), current
                )
            two_a = 2 * a
            record(_normalize_root(-b + root, two_a))
            record(_normalize_root(-b - root, two_a))
            current = BinaryForm([QOmega.one()])
            continue
        if d == 3 and not current.coeffs[1] and not current.coeffs[2]:
            # a s^3 + b t^3: roots s/t = r * (cube roots of unity)
            ratio = (-current.coeffs[3]) / current.coeffs[0]
            r = ratio.cbrt()
            if r is None:
                return BinaryFactorization(
                    form.degree, sorted_roots(counts), current
                )
            for zeta in CUBE_ROOTS_OF_UNITY:
                record(_normalize_root(r * zeta, QOmega.one()))
            current = BinaryForm([QOmega.one()])
            continue
        return BinaryFactorization(form.degree, sorted_roots(counts), current)
    return BinaryFactorization(form.degree, sorted_roots(counts), None)


def sorted_roots(counts: dict) -> List[Tuple[ProjPoint, int]]:
    """Deterministic ordering: finite roots by the (a, b) of s, then [1:0]."""

    def key(item):
        (s, t), _ = item
        if not t:
            return (1,)
        return (0, s.a, s.b)

    return sorted(counts.items(), key=key)


def wronskian(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """df/ds * dg/dt - df/dt * dg/ds, the ramification form of a pencil."""
    return f.derivative_s() * g.derivative_t() - f.derivative_t() * g.derivative_s()


def _t_poly(form: BinaryForm) -> List[QOmega]:
    """Coefficients of the dehomogenization f(1, t), trailing zeros dropped."""
    coeffs = list(form.coeffs)
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def _poly_divmod(num: List[QOmega], den: List[QOmega]):
    """Quotient/remainder of univariate polynomials over Q(w), low-to-high."""
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(num)
    quo = [QOmega.zero()] * max(0, len(num) - len(den) + 1)
    lead = den[-1]
    while len(rem) >= len(den):
        factor = rem[-1] / lead
        shift = len(rem) - len(den)
        quo[shift] = factor
        for k, c in enumerate(den):
            rem[shift + k] = rem[shift + k] - factor * c
        while rem and rem[-1].is_zero():
            rem.pop()
        if not rem:
            break
    return quo, rem


def _poly_gcd(a: List[QOmega], b: List[QOmega]) -> List[QOmega]:
    """Monic gcd over Q(w); the zero polynomial is the empty list."""
    a, b = list(a), list(b)
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def form_gcd(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """Greatest common divisor of two binary forms (monic in t, s-power exact).

    Common roots at [0:1] show up as shared trailing-coefficient zeros and
    are restored as an explicit power of s after the univariate gcd.
    """
    if f.is_zero() and g.is_zero():
        raise ZeroForm("gcd of two zero forms")
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    pf, pg = _t_poly(f), _t_poly(g)
    s_mult = min(f.degree - (len(pf) - 1), g.degree - (len(pg) - 1))
    core = _poly_gcd(pf, pg)
    return BinaryForm(core + [QOmega.zero()] * s_mult)


def multiple_root_excess(f: BinaryForm) -> int:
    """Sum over repeated roots of (multiplicity - 1), found exactly."""
    if f.is_zero():
        raise ZeroForm("zero form has no well-defined root structure")
    if f.degree <= 1:
        return 0
    return form_gcd(f.derivative_s(), f.derivative_t()).degree


def distinct_root_count(f: BinaryForm) -> int:
    """Number of distinct projective roots, computed exactly."""
    return f.degree - multiple_root_excess(f)
