"""Random objects shared by the unit and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction

from brzeta.algebra import DisjointUnionAlgebra, Forest, make_tree
from brzeta.germs import Germ, Poly
from brzeta.linear import AffineForm, LinearForm


def random_form(rng: random.Random, variables) -> LinearForm:
    while True:
        L = LinearForm({v: rng.randint(-2, 2) for v in variables})
        if L:
            return L


def random_poly(rng: random.Random, variables, degree: int = 2) -> Poly:
    p = Poly.const(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
    for _ in range(rng.randint(0, 3)):
        mono = Poly.const(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
        for _ in range(rng.randint(1, degree)):
            mono = mono.mul(Poly.var(rng.choice(variables)))
        p = p + mono
    return p


def random_germ(rng: random.Random, variables=(1, 2, 3), max_pole_order: int = 3,
                units: bool = False, terms: int = 3, degree: int = 2) -> Germ:
    """Up to `terms` terms p(z) / prod L^m with total pole order <= max_pole_order."""
    variables = list(variables)
    g = Germ.polynomial(random_poly(rng, variables, degree))
    for _ in range(rng.randint(1, terms)):
        order = rng.randint(1, max_pole_order)
        poles = []
        for _ in range(order):
            sub = rng.sample(variables, rng.randint(1, len(variables)))
            poles.append((random_form(rng, sub), 1))
        us = []
        if units and rng.random() < 0.3:
            us.append((AffineForm(random_form(rng, variables), 1), 1))
        g = g + Germ.term(random_poly(rng, variables, degree), poles, us)
    return g


def random_forest_shape(rng: random.Random, max_vertices: int) -> list:
    """Parent list of a random forest on 1..max_vertices vertices (None = root)."""
    n = rng.randint(1, max_vertices)
    return [None] + [rng.randrange(i) if rng.random() < 0.7 else None for i in range(1, n)]


def forest_from_parents(parents: list, decoration) -> Forest:
    kids: dict = {i: [] for i in range(len(parents))}
    for i, p in enumerate(parents):
        if p is not None:
            kids[p].append(i)
    alg = DisjointUnionAlgebra()

    def build(i):
        return make_tree(decoration(i), [build(c) for c in kids[i]], alg)

    return Forest(build(i) for i, p in enumerate(parents) if p is None)


def random_set_forest(rng: random.Random, max_vertices: int) -> Forest:
    """Forest decorated by the singletons {1}, {2}, ..."""
    return forest_from_parents(random_forest_shape(rng, max_vertices),
                               lambda i: frozenset([i + 1]))


def all_shapes(n: int) -> list:
    """Every parent list on n vertices in which parents precede children.

    Isomorphic forests appear more than once; callers deduplicate."""
    out = [[]]
    for i in range(n):
        out = [p + [q] for p in out for q in [None] + list(range(i))]
    return out
