from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from brzeta.linear import (IDENTITY, AffineForm, InnerProduct, LinearForm, Subspace, inner,
                           linear_relation, orthogonal_complement, rank, solve_in_basis,
                           spans_orthogonal)

forms = st.dictionaries(st.integers(1, 4), st.integers(-3, 3), max_size=4).map(LinearForm)


def test_form_basics():
    L = LinearForm({1: 1, 2: -2, 3: 0})
    assert L.support() == {1, 2}
    assert L({1: 3, 2: 1}) == 1
    assert L([3, 1]) == 1
    assert str(L) == "z1 - 2*z2"
    assert LinearForm({1: Fraction(2, 3), 2: Fraction(-4, 3)}).primitive() == L
    assert LinearForm({1: -2, 2: 4}).primitive() == L
    c, M = LinearForm({2: 3, 4: 6}).normalized()
    assert c == 3 and M == LinearForm({2: 1, 4: 2})
    assert not LinearForm() and LinearForm({1: 1} ) - LinearForm.var(1) == LinearForm()
    with pytest.raises(ValueError):
        LinearForm({0: 1})


@given(forms)
def test_form_json_roundtrip(L):
    assert LinearForm.from_json(json.loads(json.dumps(L.to_json()))) == L
    A = AffineForm(L, Fraction(-1, 3))
    assert AffineForm.from_json(A.to_json()) == A


def test_affine():
    A = AffineForm(LinearForm.var(1), 2)
    assert A({1: 1}) == 3
    assert A.is_unit_at_zero() and not A.is_homogeneous()
    assert (A - 2).is_homogeneous()
    assert (2 - A) == AffineForm(-LinearForm.var(1), 0)
    assert str(A) == "z1 + 2"


def test_rank_and_relations():
    a, b = LinearForm({1: 1}), LinearForm({1: 1, 2: 1})
    c = LinearForm({2: 2})
    assert rank([a, b]) == 2
    assert rank([a, b, c]) == 2
    rel = linear_relation([a, b, c])
    assert rel is not None
    assert a * rel[0] + b * rel[1] + c * rel[2] == LinearForm()
    assert linear_relation([a, b]) is None
    assert solve_in_basis([a, b], [c]) == [[-2, 2]]
    with pytest.raises(ValueError):
        solve_in_basis([a], [c])


@given(st.lists(forms, min_size=1, max_size=4))
def test_relation_consistent_with_rank(fs):
    nonzero = [f for f in fs if f]
    rel = linear_relation(nonzero) if nonzero else None
    if nonzero and rank(nonzero) < len(nonzero):
        total = LinearForm()
        for f, c in zip(nonzero, rel):
            total = total + f * c
        assert total == LinearForm() and any(rel)
    elif nonzero:
        assert rel is None


def test_inner_product():
    Q = InnerProduct.from_entries([(1, 2, Fraction(1, 2))])
    assert Q.value(2, 1) == Fraction(1, 2) and Q.value(3, 3) == 1
    assert inner(Q, LinearForm.var(1), LinearForm.var(2)) == Fraction(1, 2)
    assert inner(IDENTITY, LinearForm({1: 1, 2: 1}), LinearForm({1: 1, 2: -1})) == 0
    assert not spans_orthogonal(Q, Subspace([LinearForm.var(1)]), Subspace([LinearForm.var(2)]))
    with pytest.raises(ValueError):
        InnerProduct.from_entries([(1, 2, 2)])            # not positive definite
    with pytest.raises(ValueError):
        InnerProduct.from_entries([(1, 2, 0), (2, 1, Fraction(1, 3))])
    assert InnerProduct.from_entries(Q.to_json()["entries"]) == Q


def test_inner_product_file(tmp_path):
    p = tmp_path / "q.json"
    p.write_text(json.dumps({"entries": [[1, 3, "1/3"]]}))
    Q = InnerProduct.load(p)
    assert Q.value(3, 1) == Fraction(1, 3)
    assert Q.touched() == [1, 3]


COUPLED = InnerProduct.from_entries([(1, 2, Fraction(1, 3))])


@given(st.lists(forms, max_size=3), st.sampled_from([IDENTITY, COUPLED]))
def test_orthogonal_complement(fs, Q):
    S = Subspace(fs)
    H = orthogonal_complement(Q, S, range(1, 5))
    assert H.rank() + S.rank() == 4
    assert all(inner(Q, h, f) == 0 for h in H.spanning for f in S.spanning)


def test_subspace():
    S = Subspace([LinearForm.var(1), LinearForm({1: 1, 2: 1}), LinearForm()])
    assert S.rank() == 2 and S.contains(LinearForm.var(2))
    assert not S.contains(LinearForm.var(3))
    assert len(S.basis()) == 2
    assert S.contains_subspace(Subspace([LinearForm({1: 2, 2: -1})]))
