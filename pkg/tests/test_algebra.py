from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from brzeta.algebra import (EMPTY_FOREST, DisjointUnionAlgebra, Forest, ForestSyntaxError,
                            LinComb, LocalityError, PartialSumAlgebra, RationalsModZ,
                            WordConcatenation, b_plus, branched_lift, check_locality_laws,
                            diamond, flatten, format_forest, free_rb_operator,
                            lift_through_words, make_tree, parse_forest_text, quasi_shuffle,
                            rb_weight, star)

ALG = DisjointUnionAlgebra()


def letters(*xs):
    return tuple(frozenset([x]) for x in xs)


@st.composite
def disjoint_words(draw, count, min_size=0):
    pool = draw(st.permutations(range(12)))
    sizes = [draw(st.integers(min_size, 3)) for _ in range(count)]
    out, k = [], 0
    for s in sizes:
        out.append(letters(*pool[k:k + s]))
        k += s
    return out


def test_quasi_shuffle_small():
    a, b = letters(1, 2)
    got = quasi_shuffle(1, (a,), (b,), ALG)
    assert got == LinComb({(a, b): 1, (b, a): 1, (a | b,): 1})
    assert quasi_shuffle(0, (a,), (b,), ALG) == LinComb({(a, b): 1, (b, a): 1})
    with pytest.raises(LocalityError):
        quasi_shuffle(1, (a,), (a,), ALG)


@pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (2, 2), (3, 2)])
def test_quasi_shuffle_term_count(p, q):
    # the number of words (with multiplicity) is a Delannoy number
    u, v = letters(*range(p)), letters(*range(10, 10 + q))
    delannoy = sum(2 ** k * _binom(p, k) * _binom(q, k) for k in range(min(p, q) + 1))
    assert sum(quasi_shuffle(1, u, v, ALG).terms.values()) == delannoy
    shuffle = _binom(p + q, p)
    assert sum(quasi_shuffle(0, u, v, ALG).terms.values()) == shuffle


def _binom(n, k):
    from math import comb
    return comb(n, k)


@given(disjoint_words(3), st.sampled_from([-1, 0, 1]))
def test_star_associative_commutative(ws, lam):
    a, b, c = (LinComb.single(w) for w in ws)
    assert star(lam, star(lam, a, b, ALG), c, ALG) == star(lam, a, star(lam, b, c, ALG), ALG)
    assert star(lam, a, b, ALG) == star(lam, b, a, ALG)


@given(disjoint_words(2, min_size=1), st.sampled_from([-1, 0, 1]))
def test_free_rota_baxter_identity(ws, lam):
    P = lambda x: x.map_keys(lambda w: free_rb_operator(w, ALG))
    x, y = (LinComb.single(w) for w in ws)
    lhs = diamond(lam, P(x), P(y), ALG)
    rhs = P(diamond(lam, P(x), y, ALG) + diamond(lam, x, P(y), ALG)
            + diamond(lam, x, y, ALG).scale(lam))
    assert lhs == rhs


def test_rationals_counterexample():
    rep = check_locality_laws(RationalsModZ(), [Fraction(1, 3), Fraction(2, 3)])
    assert not rep.passed
    a, b = rep.witness("closure")
    assert (a, b) == (Fraction(1, 3), Fraction(1, 3))
    assert "FAIL" in str(rep)


def test_disjoint_union_is_locality():
    samples = [frozenset(s) for s in ([1], [2], [1, 2], [3], [])]
    assert check_locality_laws(ALG, samples).passed
    words = [letters(1), letters(2, 3), letters(4)]
    assert check_locality_laws(WordConcatenation(ALG), words).passed


def test_rb_weight():
    assert [rb_weight(l) for l in (-1, 0, 1)] == [1, 0, -1]
    with pytest.raises(ValueError):
        rb_weight(2)


def test_flatten_example():
    a, b, c = letters(1, 2, 3)
    t = make_tree(a, [make_tree(b, [], ALG), make_tree(c, [], ALG)], ALG)
    got = flatten(1, t, ALG)
    assert got == LinComb({(a, b, c): 1, (a, c, b): 1, (a, b | c): 1})
    assert flatten(1, EMPTY_FOREST, ALG) == LinComb.single(())
    with pytest.raises(LocalityError):
        b_plus(a, Forest([make_tree(a, [], ALG)]), ALG)


def _brute_nested(forest, dec, n, strict):
    """Sum over all labellings of the forest by integers below (or up to) n,
    children strictly below (or at most) their parents, of the product of
    the vertex functions.  Independent of the operator machinery."""
    verts, parent = [], []

    def walk(t, p):
        verts.append(t.decoration)
        parent.append(p)
        me = len(verts) - 1
        for c in t.children:
            walk(c, me)

    for t in forest:
        walk(t, None)
    top = n - 1 if strict else n
    total = Fraction(0)
    for assign in itertools.product(range(1, top + 1), repeat=len(verts)):
        ok = True
        for v, p in enumerate(parent):
            bound = n if p is None else assign[p]
            if (strict and assign[v] >= bound) or (not strict and assign[v] > bound):
                ok = False
                break
        if ok:
            term = Fraction(1)
            for v, d in enumerate(verts):
                term *= dec(d)(assign[v])
            total += term
    return total


@st.composite
def forests(draw, max_vertices=4):
    n = draw(st.integers(1, max_vertices))
    parents = [None] + [draw(st.one_of(st.none(), st.integers(0, i - 1))) for i in range(1, n)]
    kids = {i: [] for i in range(n)}
    for i, p in enumerate(parents):
        if p is not None:
            kids[p].append(i)

    def build(i):
        return make_tree(frozenset([i + 1]), [build(c) for c in kids[i]], ALG)

    return Forest(build(i) for i, p in enumerate(parents) if p is None)


def _poly_dec(letter):
    return (Fraction(0),) * sum(x % 3 for x in letter) + (Fraction(1),)


@given(forests(), st.booleans())
def test_branched_lift_matches_brute_force(F, strict):
    ps = PartialSumAlgebra(strict)
    val = branched_lift(ps.operator, F, ps, _poly_dec)
    fn = lambda d: (lambda m: Fraction(m) ** sum(x % 3 for x in d))
    for n in (1, 3, 5):
        assert ps.evaluate(val, n) == _brute_nested(F, fn, n, strict)


@given(forests(5), st.booleans())
def test_lift_factorises_through_words(F, strict):
    ps = PartialSumAlgebra(strict)
    lam = ps.weight
    lhs = branched_lift(ps.operator, F, ps, _poly_dec)
    rhs = lift_through_words(ps.operator, lam, F, ps, _poly_dec, ALG)
    assert lhs == rhs


def test_partial_sum_operator():
    weak, strict = PartialSumAlgebra(False), PartialSumAlgebra(True)
    f = (Fraction(0), Fraction(0), Fraction(1))
    assert weak.evaluate(weak(f), 10) == 385
    assert strict.evaluate(strict(f), 10) == 285


def _parse(text):
    return Forest(parse_forest_text(text, lambda body, pos: int(body),
                                    lambda d, ch: make_tree(frozenset([d]), ch, ALG)))


def test_parse_and_format():
    F = _parse("T(1)[T(2), T(3)[T(4)]], T(5)")
    assert F.size == 5 and len(F) == 2
    text = format_forest(F, lambda d: str(next(iter(d))))
    assert _parse(text) == F
    assert format_forest(EMPTY_FOREST, str) == "empty"
    assert _parse("empty") == EMPTY_FOREST
    with pytest.raises(ForestSyntaxError) as err:
        _parse("T(1)[T(2)")
    assert err.value.position == 9
    with pytest.raises(ForestSyntaxError):
        _parse("T(1) x")
