"""Quick randomised invariant suites run by `brzeta check`."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .algebra import (DisjointUnionAlgebra, Forest, LinComb, PartialSumAlgebra, RationalsModZ,
                      branched_lift, check_locality_laws, diamond, free_rb_operator,
                      lift_through_words, make_tree, star)
from .germs import Germ, germ_equal, project_minus, project_plus
from .linear import IDENTITY, LinearForm
from .symbols import SymbolGerm, euler_maclaurin, partial_sum_oracle
from .zeta import EngineConfig, relabel, renormalised_bzv, vertex


@dataclass
class CheckOutcome:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"suite": self.suite, "name": self.name, "passed": self.passed, "detail": self.detail}


def suite_algebra(rng: random.Random) -> list[CheckOutcome]:
    alg = DisjointUnionAlgebra()
    out = []
    ok = True
    for _ in range(20):
        pool = list(range(30))
        rng.shuffle(pool)
        u, v, w = (tuple(frozenset([x]) for x in pool[i * 3:i * 3 + rng.randint(0, 3)]) for i in range(3))
        for lam in (-1, 0, 1):
            a, b, c = LinComb.single(u), LinComb.single(v), LinComb.single(w)
            if star(lam, star(lam, a, b, alg), c, alg) != star(lam, a, star(lam, b, c, alg), alg):
                ok = False
            if star(lam, a, b, alg) != star(lam, b, a, alg):
                ok = False
    out.append(CheckOutcome("algebra", "quasi-shuffle associative and commutative", ok))
    ok = True
    for _ in range(20):
        pool = list(range(30))
        rng.shuffle(pool)
        u = tuple(frozenset([x]) for x in pool[:rng.randint(1, 3)])
        v = tuple(frozenset([x]) for x in pool[10:10 + rng.randint(1, 3)])
        for lam in (-1, 0, 1):
            P = lambda x: x.map_keys(lambda w: free_rb_operator(w, alg))
            x, y = LinComb.single(u), LinComb.single(v)
            lhs = diamond(lam, P(x), P(y), alg)
            rhs = P(diamond(lam, P(x), y, alg) + diamond(lam, x, P(y), alg)
                    + diamond(lam, x, y, alg).scale(lam))
            ok = ok and lhs == rhs
    out.append(CheckOutcome("algebra", "free Rota-Baxter identity", ok))
    rep = check_locality_laws(RationalsModZ(), [Fraction(1, 3), Fraction(2, 3), Fraction(1, 2)])
    witness = rep.witness("closure")
    out.append(CheckOutcome("algebra", "rationals counterexample detected",
                            not rep.passed and witness is not None, str(witness)))
    ok = True
    for strict, lam in ((True, 1), (False, -1)):
        ps = PartialSumAlgebra(strict)
        for _ in range(10):
            F = _random_forest(rng, 5)
            # letter {x, y, ...} -> n^(x%3 + y%3 + ...), multiplicative on disjoint letters
            dec = lambda letter: (Fraction(0),) * sum(x % 3 for x in letter) + (Fraction(1),)
            lhs = branched_lift(ps.operator, F, ps, dec)
            rhs = lift_through_words(ps.operator, lam, F, ps, dec, DisjointUnionAlgebra())
            ok = ok and all(ps.evaluate(lhs, n) == ps.evaluate(rhs, n) for n in range(1, 8))
    out.append(CheckOutcome("algebra", "branched lift factorises through words", ok))
    return out


def _random_forest(rng: random.Random, max_vertices: int) -> Forest:
    n = rng.randint(1, max_vertices)
    alg = DisjointUnionAlgebra()
    parents = [None] + [rng.randrange(i) if rng.random() < 0.7 else None for i in range(1, n)]
    kids: dict = {i: [] for i in range(n)}
    for i, p in enumerate(parents):
        if p is not None:
            kids[p].append(i)

    def build(i):
        return make_tree(frozenset([i + 1]), [build(c) for c in kids[i]], alg)

    return Forest(build(i) for i, p in enumerate(parents) if p is None)


def _random_germ(rng: random.Random) -> Germ:
    g = Germ.const(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
    forms = [LinearForm({1: 1}), LinearForm({1: 1, 2: 1}), LinearForm({2: 1, 3: -1})]
    for _ in range(rng.randint(1, 3)):
        L = rng.choice(forms)
        num = Germ.var(rng.randint(1, 3)) * Fraction(rng.randint(-3, 3))
        g = g + num * Germ.pole(L, rng.randint(1, 2))
    return g


def suite_germ(rng: random.Random) -> list[CheckOutcome]:
    ok_sum = ok_idem = True
    for _ in range(20):
        g = _random_germ(rng)
        p, m = project_plus(IDENTITY, g), project_minus(IDENTITY, g)
        ok_sum = ok_sum and germ_equal(p + m, g)
        ok_idem = ok_idem and germ_equal(project_plus(IDENTITY, p), p)
    half = project_plus(IDENTITY, Germ.var(1) * Germ.pole(LinearForm({1: 1, 2: 1})))
    return [CheckOutcome("germ", "projections sum to the identity", ok_sum),
            CheckOutcome("germ", "pi_+ is idempotent", ok_idem),
            CheckOutcome("germ", "pi_+(z1/(z1+z2)) = 1/2", germ_equal(half, Germ.const(Fraction(1, 2))))]


def suite_symbol(rng: random.Random) -> list[CheckOutcome]:
    ok = True
    for k in range(4):
        sigma = SymbolGerm.polynomial([0] * k + [1])
        for lam, mode in ((1, "weak"), (-1, "strict")):
            s = euler_maclaurin(lam, sigma)
            for N in rng.sample(range(1, 50), 5):
                ok = ok and s.evaluate(N) == partial_sum_oracle(sigma, N, mode=mode)
    return [CheckOutcome("symbol", "Euler-Maclaurin matches partial sums on polynomials", ok)]


def suite_zeta(rng: random.Random) -> list[CheckOutcome]:
    cfg = EngineConfig(mode="exact")
    expected = {0: Fraction(-1, 2), -1: Fraction(-1, 12), -2: Fraction(0), -3: Fraction(1, 120)}
    ok = all(renormalised_bzv(-1, vertex(1, s), config=cfg).value == v for s, v in expected.items())
    out = [CheckOutcome("zeta", "depth one values", ok)]
    F = Forest([vertex(1, -1, [vertex(2, -2)])])
    a = renormalised_bzv(-1, F, config=cfg, route="both")
    b = renormalised_bzv(-1, relabel(F, {1: 7, 2: 3}), config=cfg)
    out.append(CheckOutcome("zeta", "routes agree and labels do not matter",
                            a.checks.get("routes_agree", False) and a.value == b.value))
    F1, F2 = vertex(1, -1), vertex(2, 0, [vertex(3, -1)])
    p = renormalised_bzv(-1, Forest([F1, F2]), config=cfg).value
    q = renormalised_bzv(-1, F1, config=cfg).value * renormalised_bzv(-1, F2, config=cfg).value
    out.append(CheckOutcome("zeta", "multiplicative on disjoint labels", p == q))
    return out


SUITES: dict[str, Callable] = {"algebra": suite_algebra, "germ": suite_germ,
                               "symbol": suite_symbol, "zeta": suite_zeta}


def run_suites(names: list[str], seed: int = 0) -> list[CheckOutcome]:
    out = []
    for name in names:
        out.extend(SUITES[name](random.Random(seed)))
    return out
