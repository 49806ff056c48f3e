from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from brzeta.numerics import (EULER_GAMMA, CoeffPoly, FormalConstant, bernoulli, chi_moment,
                             constant_numeric_value, excision, faulhaber_polynomial,
                             rational_reconstruct, stieltjes, unknown_function, zeta_at,
                             zeta_at_nonpositive, zeta_deriv)


def test_bernoulli_small():
    assert [bernoulli(k) for k in range(7)] == [1, Fraction(-1, 2), Fraction(1, 6), 0,
                                               Fraction(-1, 30), 0, Fraction(1, 42)]
    assert bernoulli(12) == Fraction(-691, 2730)
    with pytest.raises(ValueError):
        bernoulli(-1)


@pytest.mark.parametrize("k", range(0, 30, 2))
def test_bernoulli_against_mpmath(k):
    assert float(bernoulli(k)) == pytest.approx(float(mpmath.bernoulli(k)), rel=1e-14)


def test_zeta_nonpositive():
    assert zeta_at_nonpositive(0) == Fraction(-1, 2)
    assert zeta_at_nonpositive(1) == Fraction(-1, 12)
    assert zeta_at_nonpositive(2) == 0
    assert zeta_at_nonpositive(3) == Fraction(1, 120)
    for n in range(12):
        assert float(zeta_at_nonpositive(n)) == pytest.approx(float(mpmath.zeta(-n)), abs=1e-15)


@given(st.integers(0, 8), st.integers(1, 40))
def test_faulhaber(k, N):
    weak = faulhaber_polynomial(k)
    strict = faulhaber_polynomial(k, strict=True)
    ev = lambda c: sum(a * N ** i for i, a in enumerate(c))
    assert ev(weak) == sum(m ** k for m in range(1, N + 1))
    assert ev(strict) == sum(m ** k for m in range(1, N))


def test_faulhaber_squares():
    N = 17
    assert sum(c * N ** i for i, c in enumerate(faulhaber_polynomial(2))) == N * (N + 1) * (2 * N + 1) // 6


def test_rational_reconstruct():
    assert rational_reconstruct(1 / 3, 100, 1e-12) == Fraction(1, 3)
    assert rational_reconstruct(-1 / 12 + 1e-11, 10 ** 6, 1e-9) == Fraction(-1, 12)
    assert rational_reconstruct(float(mpmath.pi), 10, 1e-9) is None
    with pytest.raises(ValueError):
        rational_reconstruct(0.5, 0, 1e-9)


@given(st.fractions(max_denominator=1000).filter(lambda q: abs(q) < 1000))
def test_reconstruct_roundtrip(q):
    assert rational_reconstruct(float(q), 10 ** 6, 1e-9) == q


def test_constant_values():
    assert constant_numeric_value(zeta_at(2)) == pytest.approx(float(mpmath.pi ** 2 / 6))
    assert constant_numeric_value(EULER_GAMMA) == pytest.approx(0.5772156649015329)
    assert constant_numeric_value(stieltjes(1)) == pytest.approx(-0.0728158454836767)
    assert constant_numeric_value(zeta_deriv(1, 0)) == pytest.approx(-0.5 * float(mpmath.log(2 * mpmath.pi)))
    with pytest.raises(ValueError):
        constant_numeric_value(unknown_function("u", 1, [1]))
    with pytest.raises(ValueError):
        zeta_at(1)
    with pytest.raises(ValueError):
        zeta_deriv(1, 1)


def test_excision_and_moment():
    assert excision(0) == 0 and excision(1) == 1 and excision(-3) == 0
    assert excision(0.5) == pytest.approx(0.5)
    # the moment of exponent 0 is 1 - int_0^1 (1 - chi) = 1/2 by symmetry
    assert constant_numeric_value(chi_moment(0)) == pytest.approx(0.5)


def test_constant_json_roundtrip():
    for c in (zeta_at(3), zeta_deriv(2, 0), EULER_GAMMA, stieltjes(2), chi_moment(Fraction(1, 2)),
              unknown_function("f", 2, [3, 1])):
        assert FormalConstant.from_json(c.to_json()) == c
    assert unknown_function("f", 2, [3, 1]).vanishing_order == 2
    with pytest.raises(ValueError):
        FormalConstant("nonsense")


def test_coeffpoly_ring():
    z2, g = CoeffPoly.atom(zeta_at(2)), CoeffPoly.atom(EULER_GAMMA)
    p = (z2 + g) ** 2 - z2 * z2 - 2 * z2 * g
    assert p == g * g
    assert (p - g * g).terms == {}
    assert CoeffPoly.const(Fraction(3, 4)).to_rational() == Fraction(3, 4)
    assert not (z2 + 1).is_rational()
    with pytest.raises(ValueError):
        (z2 + 1).to_rational()
    assert (z2 + 1).constants() == {zeta_at(2)}
    assert float((z2 * 6).numeric()) == pytest.approx(float(mpmath.pi ** 2))
    assert CoeffPoly.from_json((z2 * g - 3).to_json()) == z2 * g - 3
    assert str(CoeffPoly.const(0)) == "0"


coeffs = st.builds(lambda a, b, c: CoeffPoly.const(a) + CoeffPoly.atom(zeta_at(2)) * b
                   + CoeffPoly.atom(EULER_GAMMA, 2) * c,
                   st.fractions(max_denominator=9), st.integers(-3, 3), st.integers(-3, 3))


@given(coeffs, coeffs, coeffs)
def test_coeffpoly_laws(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a - a == CoeffPoly()
