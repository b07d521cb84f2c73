"""Sparse polynomial ring over Q(w): arithmetic, calculus, restriction."""

import random
from fractions import Fraction

import pytest

from cubiclines.errors import DimensionMismatch
from cubiclines.field import OMEGA, QOmega
from cubiclines.multipoly import MultiPoly


def rand_poly(rng, n_vars, max_deg=3, n_terms=6):
    terms = {}
    for _ in range(n_terms):
        exps = [0] * n_vars
        for _ in range(rng.randint(0, max_deg)):
            exps[rng.randrange(n_vars)] += 1
        terms[tuple(exps)] = QOmega(rng.randint(-6, 6), rng.randint(-3, 3))
    return MultiPoly(n_vars, terms)


def rand_point(rng, n_vars):
    return [
        QOmega(Fraction(rng.randint(-5, 5), rng.randint(1, 3)), rng.randint(-2, 2))
        for _ in range(n_vars)
    ]


def test_constructors():
    x = MultiPoly.variable(4, 2)
    assert x.degree() == 1
    assert x.coefficient((0, 0, 1, 0)) == 1
    assert MultiPoly.zero(3).is_zero()
    c = MultiPoly.constant(3, QOmega(2, 1))
    assert c.degree() == 0
    assert c.evaluate([1, 2, 3]) == QOmega(2, 1)
    lf = MultiPoly.linear_form([1, OMEGA, 0])
    assert lf.evaluate([1, 1, 5]) == 1 + OMEGA


def test_zero_coefficients_are_dropped():
    p = MultiPoly(2, {(1, 0): QOmega(0), (0, 1): QOmega(3)})
    assert (1, 0) not in p.terms
    assert p == MultiPoly(2, {(0, 1): QOmega(3)})


def test_ring_ops_agree_with_evaluation():
    rng = random.Random(41)
    for _ in range(120):
        n = rng.choice((2, 3, 4))
        f, g = rand_poly(rng, n), rand_poly(rng, n)
        pt = rand_point(rng, n)
        assert (f + g).evaluate(pt) == f.evaluate(pt) + g.evaluate(pt)
        assert (f - g).evaluate(pt) == f.evaluate(pt) - g.evaluate(pt)
        assert (f * g).evaluate(pt) == f.evaluate(pt) * g.evaluate(pt)
        assert (-f).evaluate(pt) == -f.evaluate(pt)
        assert (f * QOmega(2, 1)).evaluate(pt) == f.evaluate(pt) * QOmega(2, 1)


def test_mixed_variable_counts_rejected():
    f = MultiPoly.variable(3, 0)
    g = MultiPoly.variable(4, 0)
    with pytest.raises(DimensionMismatch):
        f + g
    with pytest.raises(DimensionMismatch):
        f.evaluate([1, 2])


def test_degree_and_homogeneity():
    x0 = MultiPoly.variable(2, 0)
    x1 = MultiPoly.variable(2, 1)
    cubic = x0 * x0 * x0 + x0 * x1 * x1
    assert cubic.degree() == 3
    assert cubic.is_homogeneous()
    assert not (cubic + x1).is_homogeneous()
    assert MultiPoly.zero(2).degree() == -1


def test_partials_on_a_monomial():
    # d/dx0 (x0^2 x1) = 2 x0 x1, d/dx1 = x0^2
    x0 = MultiPoly.variable(2, 0)
    x1 = MultiPoly.variable(2, 1)
    m = x0 * x0 * x1
    assert m.partial(0) == x0 * x1 * MultiPoly.constant(2, 2)
    assert m.partial(1) == x0 * x0
    assert m.partial(0).partial(1) == m.partial(1).partial(0)


def test_euler_identity():
    """sum x_i df/dx_i = deg * f for homogeneous f."""
    rng = random.Random(42)
    for _ in range(40):
        n = rng.choice((3, 4))
        # force homogeneous degree 3
        terms = {}
        for _ in range(5):
            exps = [0] * n
            for _ in range(3):
                exps[rng.randrange(n)] += 1
            terms[tuple(exps)] = QOmega(rng.randint(-4, 4), rng.randint(-2, 2))
        f = MultiPoly(n, terms)
        euler = MultiPoly.zero(n)
        for i in range(n):
            euler = euler + MultiPoly.variable(n, i) * f.partial(i)
        assert euler == f * MultiPoly.constant(n, 3)


def test_polar_matches_gradient_pairing():
    rng = random.Random(43)
    for _ in range(30):
        f = rand_poly(rng, 3)
        pt = rand_point(rng, 3)
        direct = MultiPoly.zero(3)
        for i, g in enumerate(f.gradient()):
            direct = direct + g * pt[i]
        assert f.polar(pt) == direct


def test_restrict_commutes_with_evaluation():
    rng = random.Random(44)
    for _ in range(60):
        n = rng.choice((3, 4, 5))
        k = rng.choice((1, 2, 3))
        f = rand_poly(rng, n)
        basis = [rand_point(rng, n) for _ in range(k)]
        g = f.restrict(basis)
        assert g.n_vars == k
        u = rand_point(rng, k)
        x = [
            sum((u[j] * basis[j][i] for j in range(k)), QOmega.zero())
            for i in range(n)
        ]
        assert g.evaluate(u) == f.evaluate(x)


def test_restrict_complex_matches_exact():
    rng = random.Random(45)
    for _ in range(25):
        f = rand_poly(rng, 4)
        basis = [rand_point(rng, 4), rand_point(rng, 4)]
        exact = f.restrict(basis)
        numeric = f.restrict_complex(
            [[v.to_complex() for v in row] for row in basis]
        )
        for exps, val in numeric.items():
            assert abs(val - exact.coefficient(exps).to_complex()) < 1e-8
        for exps, c in exact.terms.items():
            assert abs(numeric.get(exps, 0.0) - c.to_complex()) < 1e-8


def test_evaluate_complex_tracks_exact():
    rng = random.Random(46)
    for _ in range(40):
        f = rand_poly(rng, 3)
        pt = rand_point(rng, 3)
        z = [v.to_complex() for v in pt]
        assert abs(f.evaluate_complex(z) - f.evaluate(pt).to_complex()) < 1e-7


def test_json_roundtrip():
    rng = random.Random(47)
    for _ in range(20):
        f = rand_poly(rng, 4)
        g = MultiPoly.from_json(f.to_json())
        assert g == f
        assert g.n_vars == f.n_vars
