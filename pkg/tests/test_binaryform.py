"""Binary forms over Q(w): roots, gcd, multiplicity counting."""

import random

import numpy as np
import pytest

from cubiclines.binaryform import (
    BinaryForm,
    distinct_root_count,
    factor_binary_form,
    form_gcd,
    multiple_root_excess,
    wronskian,
)
from cubiclines.errors import ZeroForm
from cubiclines.field import OMEGA, ONE, QOmega


def linear(a, b):
    """The form a*s + b*t."""
    return BinaryForm([a, b])


def test_coefficient_convention():
    # coeffs[k] multiplies s^(d-k) t^k
    f = BinaryForm([1, 2, 3])
    assert f.evaluate(1, 0) == 1
    assert f.evaluate(0, 1) == 3
    assert f.evaluate(1, 1) == 6
    assert f.degree == 2


def test_product_and_difference():
    f = linear(1, -1) * linear(1, 1)  # s^2 - t^2
    assert f.coeffs == [QOmega(1), QOmega(0), QOmega(-1)]
    g = f - BinaryForm([0, 0, -1])
    assert g.coeffs == [QOmega(1), QOmega(0), QOmega(0)]


def test_derivatives():
    f = BinaryForm([1, 0, 0, -2])  # s^3 - 2 t^3
    assert f.derivative_s().coeffs == [QOmega(3), QOmega(0), QOmega(0)]
    assert f.derivative_t().coeffs == [QOmega(0), QOmega(0), QOmega(-6)]


def test_factor_recovers_constructed_roots():
    rng = random.Random(21)
    for _ in range(60):
        # one monomial root keeps the remainder quadratic, which the
        # exact factorizer finishes
        roots = [(QOmega(0), ONE)]
        f = linear(QOmega(rng.randint(1, 3)), 0)
        for _ in range(2):
            a = QOmega(rng.randint(-3, 3), rng.randint(-1, 1))
            b = QOmega(rng.randint(-3, 3))
            if not a and not b:
                a = ONE
            # root of a*s + b*t is [-b : a]
            f = f * linear(a, b)
            roots.append((-b, a))
        fac = factor_binary_form(f)
        assert fac.is_complete()
        assert sum(m for _, m in fac.roots) == 3
        for s0, t0 in roots:
            assert any(
                s0 * t1 == t0 * s1 for (s1, t1) in fac.root_points()
            )


def test_factor_binomial_cubic():
    """s^3 - 8 t^3 splits over Q(w): the cube roots of unity live here."""
    fac = factor_binary_form(BinaryForm([1, 0, 0, -8]))
    assert fac.is_complete()
    assert len(fac.roots) == 3
    for (s, t), mult in fac.roots:
        assert mult == 1
        assert s**3 == t**3 * 8


def test_factor_reports_unresolved_irreducible():
    # s^2 - 2 t^2 has no roots in Q(w)
    fac = factor_binary_form(BinaryForm([1, 0, -2]))
    assert not fac.is_complete()
    assert fac.roots == []
    with pytest.raises(ZeroForm):
        factor_binary_form(BinaryForm([0, 0]))


def test_multiplicity_bookkeeping():
    sq = linear(1, -1) * linear(1, -1) * linear(2, 1)
    assert multiple_root_excess(sq) == 1
    assert distinct_root_count(sq) == 2
    cube = linear(1, OMEGA) * linear(1, OMEGA) * linear(1, OMEGA)
    assert multiple_root_excess(cube) == 2
    assert distinct_root_count(cube) == 1
    smooth = linear(1, 0) * linear(0, 1) * linear(1, -1)
    assert distinct_root_count(smooth) == 3


def test_form_gcd():
    common = linear(1, -2)
    f = common * linear(1, 1)
    g = common * linear(3, 1) * linear(1, 0)
    d = form_gcd(f, g)
    assert d.degree == 1
    # gcd vanishes where the common factor does
    assert not d.evaluate(2, 1)
    coprime = form_gcd(linear(1, 0), linear(0, 1))
    assert coprime.degree == 0


def test_wronskian_detects_proportionality():
    rng = random.Random(22)
    for _ in range(30):
        f = BinaryForm([rng.randint(-4, 4) for _ in range(3)])
        if f.is_zero():
            continue
        c = QOmega(rng.randint(1, 5), rng.randint(0, 2))
        assert wronskian(f, f * BinaryForm([c])).is_zero()
    f = BinaryForm([1, 0, 0])  # s^2
    g = BinaryForm([0, 0, 1])  # t^2
    w = wronskian(f, g)
    assert not w.is_zero()
    # W(s^2, t^2) = 4 s t
    assert w.evaluate(1, 1) == 4
    assert not w.evaluate(1, 0)


def test_divide_root():
    f = linear(1, -1) * linear(1, 2)
    q = f.divide_root((QOmega(1), QOmega(1)))  # root [1:1] of s - t
    assert q.degree == 1
    assert not q.evaluate(-2, 1)


def test_roots_complex_match_numpy():
    rng = random.Random(23)
    for _ in range(25):
        coeffs = [rng.randint(-5, 5) for _ in range(4)]
        if not any(coeffs):
            continue
        f = BinaryForm(coeffs)
        got = f.roots_complex()
        assert len(got) == f.degree
        for s, t in got:
            val = sum(
                complex(c.a) * s ** (3 - k) * t**k
                for k, c in enumerate(f.coeffs)
            )
            assert abs(val) < 1e-7 * max(1.0, max(abs(c) for c in coeffs))
