"""Field axioms and root extraction for Q(w), w^2 = w - 1."""

import cmath
import random
from fractions import Fraction

import pytest

from cubiclines.field import (
    CUBE_ROOTS_OF_MINUS_ONE,
    CUBE_ROOTS_OF_UNITY,
    OMEGA,
    OMEGA_COMPLEX,
    ONE,
    ZERO,
    QOmega,
    rational_cbrt,
    rational_sqrt,
)


def rand_elt(rng, span=30):
    return QOmega(
        Fraction(rng.randint(-span, span), rng.randint(1, 7)),
        Fraction(rng.randint(-span, span), rng.randint(1, 7)),
    )


def test_defining_relation():
    assert OMEGA * OMEGA == OMEGA - ONE
    # w is a primitive sixth root of unity
    assert OMEGA**6 == ONE
    assert OMEGA**3 == QOmega(-1)
    assert OMEGA**2 != ONE


def test_field_axioms_bulk():
    """Ring + field laws on ten thousand random triples (seeded)."""
    rng = random.Random(20260814)
    for _ in range(10_000):
        x, y, z = rand_elt(rng), rand_elt(rng), rand_elt(rng)
        assert (x + y) + z == x + (y + z)
        assert x + y == y + x
        assert (x * y) * z == x * (y * z)
        assert x * y == y * x
        assert x * (y + z) == x * y + x * z
        assert x + ZERO == x
        assert x * ONE == x
        assert x + (-x) == ZERO
        if x:
            assert x * x.inverse() == ONE
            assert (y / x) * x == y


def test_conjugation_is_an_automorphism():
    rng = random.Random(7)
    for _ in range(300):
        x, y = rand_elt(rng), rand_elt(rng)
        assert (x + y).conj() == x.conj() + y.conj()
        assert (x * y).conj() == x.conj() * y.conj()
        assert x.conj().conj() == x
    assert OMEGA.conj() == ONE - OMEGA


def test_norm_and_trace():
    rng = random.Random(8)
    for _ in range(300):
        x, y = rand_elt(rng), rand_elt(rng)
        assert x.norm() == (x * x.conj()).a
        assert (x * x.conj()).b == 0
        assert (x * y).norm() == x.norm() * y.norm()
        assert (x + y).trace() == x.trace() + y.trace()


def test_numeric_embedding_is_a_homomorphism():
    rng = random.Random(9)
    assert abs(OMEGA_COMPLEX - cmath.exp(1j * cmath.pi / 3)) < 1e-15
    for _ in range(200):
        x, y = rand_elt(rng, span=8), rand_elt(rng, span=8)
        lhs = (x * y).to_complex()
        rhs = x.to_complex() * y.to_complex()
        assert abs(lhs - rhs) < 1e-9 * (1 + abs(rhs))
        assert abs((x + y).to_complex() - (x.to_complex() + y.to_complex())) < 1e-12


def test_coercion_and_equality():
    assert QOmega(3) == 3
    assert QOmega(Fraction(1, 2)) == Fraction(1, 2)
    assert QOmega(1, 1) != 1
    assert 2 * OMEGA == OMEGA + OMEGA
    assert (1 - OMEGA) + OMEGA == ONE
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_powers():
    rng = random.Random(10)
    for _ in range(50):
        x = rand_elt(rng, span=5)
        acc = ONE
        for k in range(6):
            assert x**k == acc
            acc = acc * x
        if x:
            assert x**-2 == (x * x).inverse()


def test_cube_root_tables():
    for r in CUBE_ROOTS_OF_MINUS_ONE:
        assert r**3 == QOmega(-1)
    for r in CUBE_ROOTS_OF_UNITY:
        assert r**3 == ONE
    assert len(set(CUBE_ROOTS_OF_MINUS_ONE)) == 3
    assert len(set(CUBE_ROOTS_OF_UNITY)) == 3


def test_rational_roots():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(Fraction(2)) is None
    assert rational_sqrt(Fraction(-1)) is None
    assert rational_cbrt(Fraction(-27, 8)) == Fraction(-3, 2)
    assert rational_cbrt(Fraction(4)) is None


def test_sqrt_in_field():
    rng = random.Random(11)
    hits = 0
    for _ in range(200):
        x = rand_elt(rng, span=6)
        sq = x * x
        r = sq.sqrt()
        assert r is not None
        assert r * r == sq
        hits += 1
    assert hits == 200
    # -3 is a square here: (2w - 1)^2 = -3
    m3 = QOmega(-3).sqrt()
    assert m3 is not None and m3 * m3 == QOmega(-3)
    assert QOmega(2).sqrt() is None


def test_cbrt_in_field():
    rng = random.Random(12)
    for _ in range(150):
        x = rand_elt(rng, span=5)
        cube = x * x * x
        r = cube.cbrt()
        assert r is not None
        assert r * r * r == cube
    assert QOmega(2).cbrt() is None
    assert QOmega(-8).cbrt() == QOmega(-2)


def test_immutability_and_hash():
    x = QOmega(1, 2)
    with pytest.raises(AttributeError):
        x.a = Fraction(5)
    assert hash(QOmega(1, 2)) == hash(QOmega(Fraction(2, 2), Fraction(4, 2)))


def test_json_roundtrip():
    rng = random.Random(13)
    for _ in range(40):
        x = rand_elt(rng)
        assert QOmega.from_json(x.to_json()) == x
