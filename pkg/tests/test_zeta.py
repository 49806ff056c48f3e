from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest

from brzeta.algebra import Forest
from brzeta.germs import Germ, germ_equal
from brzeta.linear import LinearForm
from brzeta.numerics import EULER_GAMMA, CoeffPoly, constant_numeric_value, zeta_at_nonpositive
from brzeta.zeta import (EngineConfig, RouteMismatch, _words, candidate_poles, convergent_value,
                         forest_numeric_values, numeric_word_value, regularised_bzv_germ,
                         regularised_germ_exact, relabel, renormalised_bzv, renormalised_numeric,
                         vertex)

EXACT = EngineConfig(mode="exact")
NUMERIC = EngineConfig(mode="numeric")


def exact_value(F, lam=-1, **kw):
    return renormalised_bzv(lam, F, config=EXACT, **kw).value


@pytest.mark.parametrize("s", [0, -1, -2, -3, -4, -5])
def test_depth_one_matches_bernoulli(s):
    assert exact_value(vertex(1, s)) == zeta_at_nonpositive(-s)


def test_depth_one_at_one_is_gamma():
    res = renormalised_bzv(-1, vertex(1, 1))
    assert res.mode == "exact"
    assert res.value == CoeffPoly.coerce(EULER_GAMMA)
    num = renormalised_bzv(-1, vertex(1, 1), config=NUMERIC)
    assert abs(num.float_value().real - float(constant_numeric_value(EULER_GAMMA))) < 1e-7


def test_weak_and_strict_agree_at_depth_one():
    # a single sum has no diagonal, so the conventions coincide
    for s in (-1, -2, -3):
        assert exact_value(vertex(1, s), lam=1) == exact_value(vertex(1, s), lam=-1)


def test_convergent_values():
    assert abs(convergent_value(-1, vertex(1, 2)) - float(mpmath.zeta(2))) < 1e-10
    ladder = convergent_value(-1, vertex(1, 2, [vertex(2, 2)]))
    z2, z4 = mpmath.zeta(2), mpmath.zeta(4)
    assert abs(ladder - float((z2 ** 2 - z4) / 2)) < 1e-10
    w = numeric_word_value([((1, 2),), ((2, 1),)])
    assert abs(w - float(mpmath.zeta(3))) < 1e-10


def test_corolla_against_nested_sum():
    F = vertex(1, 2, [vertex(2, 2), vertex(3, 2)])
    # sum over n of (sum_{m<n} m^-2)^2 / n^2, inner sums via the trigamma function
    oracle = mpmath.nsum(lambda n: (mpmath.zeta(2) - mpmath.psi(1, n)) ** 2 / n ** 2, [1, mpmath.inf])
    assert abs(convergent_value(-1, F) - float(oracle)) < 1e-8
    combo = sum(complex(c) * numeric_word_value(w) for w, c in _words(-1, F).items())
    assert abs(combo - float(oracle)) < 1e-8


def test_convergent_value_rejects_small_weights():
    with pytest.raises(ValueError):
        convergent_value(-1, vertex(1, 1))


def test_ladder_zero_one_numeric():
    res = renormalised_bzv(-1, vertex(1, 0, [vertex(2, 1)]))
    g = float(mpmath.euler)
    assert abs(res.float_value().real - (1 - g) / 2) < 1e-7


@pytest.mark.parametrize("F", [
    vertex(1, -1, [vertex(2, -2)]),
    vertex(1, 0, [vertex(2, -1), vertex(3, 0)]),
    Forest([vertex(1, -2), vertex(2, 0, [vertex(3, -1)])]),
])
@pytest.mark.parametrize("lam", [-1, 1])
def test_routes_agree(F, lam):
    res = renormalised_bzv(lam, F, config=EXACT, route="both")
    assert res.checks["routes_agree"]
    g = regularised_bzv_germ(lam, F, route="both")
    assert isinstance(g, Germ)


def test_relabel_invariance():
    F = vertex(1, -1, [vertex(2, 0, [vertex(3, -2)])])
    base = exact_value(F)
    for perm in ({1: 3, 2: 1, 3: 2}, {1: 10, 2: 20, 3: 30}):
        assert exact_value(relabel(F, perm)) == base


def test_truncation_invariance():
    F = vertex(1, -1, [vertex(2, -1)])
    g1, K = regularised_germ_exact(-1, F)
    g2, _ = regularised_germ_exact(-1, F, K=K + 1)
    assert germ_equal(g1, g2, upto=0)


def test_multiplicative_exact_and_numeric():
    F1, F2 = vertex(1, -1, [vertex(2, 0)]), vertex(3, -2)
    both = Forest([F1, F2])
    assert exact_value(both) == exact_value(F1) * exact_value(F2)
    n = renormalised_numeric(-1, both).float_value()
    m = renormalised_numeric(-1, F1).float_value() * renormalised_numeric(-1, F2).float_value()
    assert abs(n - m) < 1e-6


def test_rational_report():
    res = renormalised_bzv(-1, vertex(1, -1, [vertex(2, -2)]), config=EXACT)
    assert res.rational["expected"] and res.rational["is_rational"]
    q = Fraction(res.rational["value"])
    num = renormalised_bzv(-1, vertex(1, -1, [vertex(2, -2)]), config=NUMERIC)
    assert Fraction(num.rational["reconstructed"]) == q
    assert abs(num.float_value().real - float(q)) < 1e-9


def test_weight_zero_carries_note():
    res = renormalised_bzv(-1, vertex(1, 0, [vertex(2, -1)]), config=EXACT)
    assert any("extrapolation" in d for d in res.diagnostics)


def test_exact_mixed_weights():
    # inner sum over m < n of m^0 via the Hurwitz expansion; the 1/(z1+z2) pole
    # contributes gamma + pi_+(z2/(z1+z2)) = gamma + 1/2
    v = exact_value(vertex(1, 2, [vertex(2, 0)]))
    assert float(v.numeric(64)) == pytest.approx(float(mpmath.euler + 0.5 - mpmath.zeta(2)), abs=1e-15)
    assert not v.is_rational()


def test_auto_falls_back_to_numeric():
    F = vertex(1, 1, [vertex(2, 1)])
    with pytest.raises(ArithmeticError):
        renormalised_bzv(-1, F, config=EXACT)
    res = renormalised_bzv(-1, F)
    assert res.mode == "numeric"
    assert "fell back" in res.diagnostics[0]


def test_result_json_shape():
    js = renormalised_bzv(-1, vertex(1, -1), config=EXACT).to_json()
    assert js["value"]["exact"] and js["value"]["float"] == pytest.approx(-1 / 12)
    assert js["mode"] == "exact"
    assert Germ.from_json(js["germ"]) is not None


def test_candidate_poles():
    poles = candidate_poles(-1, vertex(1, 1, [vertex(2, 1)]))
    assert LinearForm({1: 1, 2: 1}) in poles
    assert candidate_poles(-1, vertex(1, -1)) == []


@pytest.mark.parametrize("lam", [-1, 1])
def test_germ_values_at_points_match_words(lam):
    F = vertex(1, 0, [vertex(2, -1), vertex(3, 1)])
    pts = [{1: 0.11, 2: 0.05, 3: -0.07}, {1: -0.03, 2: 0.13, 3: 0.09}]
    z = {k: [p[k] for p in pts] for k in (1, 2, 3)}
    direct = forest_numeric_values(lam, F, z)
    words = _words(lam, F)
    assert len(words) > 1
    for k, p in enumerate(pts):
        total = sum(complex(c) * numeric_word_value(
            [tuple((d.label, d.weight) for d in a) for a in w], z=p, lam=lam)
            for w, c in words.items())
        assert abs(total - direct[k]) < 1e-9 * max(1, abs(total))


def test_bad_lambda():
    with pytest.raises(ValueError):
        regularised_germ_exact(0, vertex(1, -1))
    with pytest.raises(ValueError):
        renormalised_bzv(-1, vertex(1, -1), config=EngineConfig(mode="bogus"))


def test_route_mismatch_is_arithmetic():
    assert issubclass(RouteMismatch, ArithmeticError)


def test_random_exact_values_are_rational():
    rng = random.Random(3)
    for _ in range(5):
        F = vertex(1, -rng.randint(1, 2), [vertex(2, -rng.randint(1, 2))])
        assert exact_value(F).is_rational()
