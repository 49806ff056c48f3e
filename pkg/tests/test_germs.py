from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from brzeta.germs import (Germ, GermAlgebra, InsufficientDepth, PoleError, Poly, decompose,
                          evaluate_point, evaluate_zero, expand_units, germ_equal,
                          homogeneous_components, independent, is_holomorphic,
                          partial_fraction_reduce, project_minus, project_plus)
from brzeta.linear import IDENTITY, AffineForm, InnerProduct, LinearForm
from brzeta.numerics import CoeffPoly, zeta_at

from helpers import random_germ

z1, z2, z3 = (Germ.var(i) for i in (1, 2, 3))
L = LinearForm


def test_poly_arithmetic():
    p = Poly.var(1) + Poly.var(2)
    assert p.power(2) == Poly.var(1).mul(Poly.var(1)) + Poly.var(1).mul(Poly.var(2)).scale(2) \
        + Poly.var(2).mul(Poly.var(2))
    assert p.power(3, max_degree=2) == Poly()
    assert p.substitute({1: Poly.var(3)}) == Poly.var(3) + Poly.var(2)
    assert p.rename({2: 5}) == Poly.var(1) + Poly.var(5)
    assert Poly.from_json(p.power(2).to_json()) == p.power(2)
    assert (p - p) == Poly()
    assert p.evaluate({1: 2, 2: Fraction(1, 2)}) == Fraction(5, 2)


def test_term_normalisation():
    g = Germ.term(Poly.const(1), [(L({1: 2}), 1)])
    assert germ_equal(g, Germ.pole(L({1: 1})).scale(Fraction(1, 2)))
    with pytest.raises(PoleError):
        Germ.pole(LinearForm())
    u = Germ.reciprocal(AffineForm(L({1: 1}), 2))
    assert evaluate_point(u, {1: 1}) == Fraction(1, 3)


def test_partial_fractions_keep_the_function():
    g = Germ.pole(L({1: 1})) * Germ.pole(L({2: 1})) * Germ.pole(L({1: 1, 2: 1}))
    h = partial_fraction_reduce(g)
    from brzeta.linear import rank
    for (poles, _), _ in h.terms.items():
        assert rank([f for f, _ in poles]) == len(poles)
    pt = {1: Fraction(3, 7), 2: Fraction(-2, 5)}
    assert evaluate_point(h, pt) == evaluate_point(g, pt)


def test_known_projections():
    half = project_plus(IDENTITY, z1 * Germ.pole(L({1: 1, 2: 1})))
    assert germ_equal(half, Germ.const(Fraction(1, 2)))
    # orthogonal numerator: nothing holomorphic survives
    assert germ_equal(project_plus(IDENTITY, z2 * Germ.pole(L({1: 1}))), Germ())
    # with z1 and z2 coupled, z2 = (z2 - z1/2) + z1/2
    Q = InnerProduct.from_entries([(1, 2, Fraction(1, 2))])
    assert germ_equal(project_plus(Q, z2 * Germ.pole(L({1: 1}))), Germ.const(Fraction(1, 2)))
    # (z1^2 + z2)/z1 = z1 + z2/z1
    g = (z1 * z1 + z2) * Germ.pole(L({1: 1}))
    assert germ_equal(project_plus(IDENTITY, g), z1)
    assert germ_equal(project_minus(IDENTITY, g), z2 * Germ.pole(L({1: 1})))


def test_units_expand():
    g = Germ.reciprocal(AffineForm(L({1: 1}), 1))       # 1/(1 + z1)
    e = expand_units(g, 3)
    assert germ_equal(e, Germ.polynomial(Poly.const(1) - Poly.var(1) + Poly.var(1).power(2)
                                         - Poly.var(1).power(3)), upto=3)
    assert evaluate_zero(g) == 1


def test_evaluate_zero():
    assert evaluate_zero(Germ.const(3) + z1) == 3
    with pytest.raises(PoleError):
        evaluate_zero(Germ.pole(L({1: 1})))
    with pytest.raises(InsufficientDepth):
        evaluate_zero(Germ.unknown(-1))
    c = Germ.const(CoeffPoly.atom(zeta_at(3)))
    assert evaluate_zero(c + 1) == CoeffPoly.atom(zeta_at(3)) + 1


def test_unknown_remainders():
    g = Germ.const(1) + Germ.unknown(0)         # 1 + O(z)
    assert germ_equal(g, Germ.const(1))
    assert evaluate_zero(g) == 1
    # pi_+ of O(z^1)/z1 is only known below degree 0
    with pytest.raises(InsufficientDepth):
        project_plus(IDENTITY, Germ.unknown(0, [(L({1: 1}), 1)]))


def test_homogeneous_components():
    g = Germ.const(2) + z1 * z2 + Germ.pole(L({1: 1}))
    comps = homogeneous_components(g, {1: 1, 2: 3}, 2)
    assert comps == {-1: 1, 0: 2, 2: 3}


def test_germ_json_roundtrip():
    g = random_germ(random.Random(4), units=True)
    assert germ_equal(Germ.from_json(g.to_json()), g)
    assert str(Germ()) == "0"


def test_rename():
    g = z1 * Germ.pole(L({1: 1, 2: 1}))
    h = g.rename({1: 3, 2: 4})
    assert evaluate_point(h, {3: 1, 4: 2}) == evaluate_point(g, {1: 1, 2: 2})


def test_independence():
    a, b = z1 * Germ.pole(L({1: 1})), Germ.pole(L({2: 1}))
    assert independent(IDENTITY, a, b)
    assert not independent(InnerProduct.from_entries([(1, 2, Fraction(1, 3))]), a, b)
    alg = GermAlgebra()
    assert alg.independent(a, b) and alg.equal(alg.product(a, b), a * b)


seeds = st.integers(0, 10 ** 6)


@given(seeds)
def test_projection_laws(seed):
    g = random_germ(random.Random(seed), units=True)
    p, m = decompose(IDENTITY, g, 2)
    assert germ_equal(p + m, expand_units(g, 2), upto=2)
    assert germ_equal(project_plus(IDENTITY, p), p)
    assert germ_equal(project_plus(IDENTITY, m), Germ())
    assert is_holomorphic(p)


@given(seeds, st.sampled_from([IDENTITY, InnerProduct.from_entries([(1, 3, Fraction(1, 4))])]))
def test_projection_laws_any_q(seed, Q):
    g = random_germ(random.Random(seed))
    p, m = decompose(Q, g)
    assert germ_equal(p + m, g)
    assert germ_equal(project_minus(Q, m), m)


@given(seeds)
def test_rota_baxter_and_multiplicativity(seed):
    rng = random.Random(seed)
    a, b = random_germ(rng, (1, 2), 2), random_germ(rng, (3, 4), 2)
    Pm = lambda g: project_minus(IDENTITY, g)
    Pp = lambda g: project_plus(IDENTITY, g)
    assert germ_equal(Pm(a) * Pm(b), Pm(Pm(a) * b + a * Pm(b) - a * b))
    assert germ_equal(Pp(a * b), Pp(a) * Pp(b))


@given(seeds)
def test_ring_laws(seed):
    rng = random.Random(seed)
    a, b, c = (random_germ(rng, max_pole_order=2) for _ in range(3))
    assert germ_equal((a * b) * c, a * (b * c))
    assert germ_equal(a * (b + c), a * b + a * c)
    assert germ_equal(a - a, Germ())
