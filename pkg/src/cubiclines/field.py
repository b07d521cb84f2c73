"""Exact arithmetic in Q(w) where w^2 = w - 1.

w is a primitive sixth root of unity (w = exp(i*pi/3) under the complex
embedding used here), so Q(w) = Q(sqrt(-3)) contains every cube root of 1
and of -1:

    cube roots of -1:  -1,  w,  1 - w
    cube roots of  1:   1,  w - 1,  -w

Elements are stored as a + b*w with ``fractions.Fraction`` components, so
all arithmetic is exact.  Square roots and cube roots inside the field are
supported where they exist (`sqrt`, `cbrt` return None otherwise); nothing
here ever falls back to floating point except the explicit `to_complex`
embedding.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Optional, Union

RationalLike = Union[int, str, Fraction]


def _fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot build an exact rational from {value!r}")


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a rational, or None if irrational/negative."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _icbrt(n: int) -> Optional[int]:
    """Exact integer cube root of n (any sign), or None."""
    if n < 0:
        r = _icbrt(-n)
        return None if r is None else -r
    if n == 0:
        return 0
    r = round(n ** (1.0 / 3.0))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c * c * c == n:
            return c
    return None


def rational_cbrt(q: Fraction) -> Optional[Fraction]:
    """Exact cube root of a rational, or None if irrational."""
    rn = _icbrt(q.numerator)
    rd = _icbrt(q.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


class QOmega:
    """Element a + b*w of Q(w), with w^2 = w - 1."""

    __slots__ = ("a", "b")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0):
        object.__setattr__(self, "a", _fraction(a))
        object.__setattr__(self, "b", _fraction(b))

    def __setattr__(self, name, value):  # immutability keeps hashing honest
        raise AttributeError("QOmega is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls) -> "QOmega":
        return cls(0, 0)

    @classmethod
    def one(cls) -> "QOmega":
        return cls(1, 0)

    @classmethod
    def omega(cls) -> "QOmega":
        return cls(0, 1)

    @classmethod
    def coerce(cls, value) -> "QOmega":
        if isinstance(value, QOmega):
            return value
        return cls(_fraction(value), 0)

    @classmethod
    def _try_coerce(cls, value) -> Optional["QOmega"]:
        try:
            return cls.coerce(value)
        except (TypeError, ValueError):
            return None

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def is_rational(self) -> bool:
        return not self.b

    # -- ring operations -------------------------------------------------

    def __add__(self, other) -> "QOmega":
        other = QOmega._try_coerce(other)
        if other is None:
            return NotImplemented
        return QOmega(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self) -> "QOmega":
        return QOmega(-self.a, -self.b)

    def __sub__(self, other) -> "QOmega":
        other = QOmega._try_coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QOmega":
        other = QOmega._try_coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "QOmega":
        other = QOmega._try_coerce(other)
        if other is None:
            return NotImplemented
        # (a1 + b1 w)(a2 + b2 w) with w^2 = w - 1
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return QOmega(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2 + b1 * b2)

    __rmul__ = __mul__

    def conj(self) -> "QOmega":
        """Field conjugate, sending w to 1 - w."""
        return QOmega(self.a + self.b, -self.b)

    def norm(self) -> Fraction:
        """Rational norm a^2 + a*b + b^2 (= |z|^2 under the embedding)."""
        return self.a * self.a + self.a * self.b + self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a + self.b

    def inverse(self) -> "QOmega":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero in Q(w)")
        c = self.conj()
        return QOmega(c.a / n, c.b / n)

    def __truediv__(self, other) -> "QOmega":
        other = QOmega._try_coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "QOmega":
        other = QOmega._try_coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "QOmega":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QOmega.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # -- equality / hashing ----------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, str)):
            other = QOmega.coerce(other)
        if not isinstance(other, QOmega):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        if not self.b:
            return f"QOmega({self.a})"
        return f"QOmega({self.a}, {self.b})"

    # -- roots inside the field -------------------------------------------

    def _uv(self) -> tuple[Fraction, Fraction]:
        """Coordinates (u, v) with self = u + v*sqrt(-3); w = (1+sqrt(-3))/2."""
        return self.a + self.b / 2, self.b / 2

    @staticmethod
    def _from_uv(u: Fraction, v: Fraction) -> "QOmega":
        # x + y*sqrt(-3) = (x - y) + 2y*w
        return QOmega(u - v, 2 * v)

    def sqrt(self) -> Optional["QOmega"]:
        """A square root in Q(w) if one exists, else None."""
        if self.is_zero():
            return QOmega.zero()
        u, v = self._uv()
        if not v:
            r = rational_sqrt(u)
            if r is not None:
                return QOmega.coerce(r)
            r = rational_sqrt(-u / 3)
            if r is not None:
                return QOmega._from_uv(Fraction(0), r)
            return None
        # (x + y sqrt(-3))^2 = u + v sqrt(-3):  x^2 - 3y^2 = u, 2xy = v
        w = rational_sqrt(u * u + 3 * v * v)
        if w is None:
            return None
        for sign in (1, -1):
            ysq = (-u + sign * w) / 6
            y = rational_sqrt(ysq)
            if y is None or not y:
                continue
            x = v / (2 * y)
            cand = QOmega._from_uv(x, y)
            if cand * cand == self:
                return cand
        return None

    def cbrt(self) -> Optional["QOmega"]:
        """A cube root in Q(w) if one exists, else None.

        Rational inputs reduce to a rational cube-root test (a rational is
        a cube in Q(w) iff it is a cube in Q).  Otherwise candidate traces
        are recovered from a numeric root of the rational cubic
        sigma^3 - 3*nu*sigma - tau and verified exactly, so any root that
        is returned is certified; a fringe candidate with an enormous
        denominator could be missed, in which case callers fall back to
        numerics.
        """
        if self.is_zero():
            return QOmega.zero()
        if self.is_rational():
            r = rational_cbrt(self.a)
            return None if r is None else QOmega.coerce(r)
        nu = rational_cbrt(self.norm())
        if nu is None:
            return None
        tau = self.trace()
        # trace sigma of the root satisfies sigma^3 - 3 nu sigma - tau = 0
        candidates = set()
        for guess in _real_cubic_roots(float(nu), float(tau)):
            frac = Fraction(guess).limit_denominator(10**9)
            for sigma in {frac, Fraction(round(guess))}:
                if sigma**3 - 3 * nu * sigma - tau == 0:
                    candidates.add(sigma)
        for sigma in candidates:
            ysq = (4 * nu - sigma * sigma) / 12
            y = rational_sqrt(ysq)
            if y is None:
                continue
            for sign in (1, -1):
                cand = QOmega._from_uv(sigma / 2, sign * y)
                if cand * cand * cand == self:
                    return cand
        return None

    # -- numeric embedding -------------------------------------------------

    def to_complex(self) -> complex:
        return float(self.a) + float(self.b) * OMEGA_COMPLEX

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b)}

    @classmethod
    def from_json(cls, data: dict) -> "QOmega":
        return cls(Fraction(data["a"]), Fraction(data["b"]))


def _real_cubic_roots(nu: float, tau: float) -> list[float]:
    """Real roots of sigma^3 - 3*nu*sigma - tau (numeric helper for cbrt)."""
    import numpy as np

    roots = np.roots([1.0, 0.0, -3.0 * nu, -tau])
    return [float(r.real) for r in roots if abs(r.imag) < 1e-8]


OMEGA_COMPLEX = cmath.exp(1j * cmath.pi / 3)

ZERO = QOmega.zero()
ONE = QOmega.one()
OMEGA = QOmega.omega()

#: the three cube roots of -1 in Q(w)
CUBE_ROOTS_OF_MINUS_ONE = (QOmega(-1), OMEGA, ONE - OMEGA)

#: the three cube roots of 1 in Q(w)
CUBE_ROOTS_OF_UNITY = (ONE, OMEGA - ONE, -OMEGA)
