"""Numeric evaluation of regularised branched zeta germs.

Each vertex carries a function F(n) of the summation variable, stored as
exact values for n <= M together with an asymptotic expansion
    F(n) ~ sum_k a_k n^{e_k} log^{p_k} n
whose exponents are e = beta_S + j for a set S of vertices (beta_v the
exponent of the vertex symbol) and an integer j, so that pieces merge
exactly.  Summation uses the Euler-Maclaurin expansion; the constant is
fixed by matching the direct partial sum at n = M.  Everything is
vectorised over sample points in extended precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Mapping, Sequence

import numpy as np

from .numerics import bernoulli

CT = np.clongdouble
RT = np.longdouble


class ConditioningError(ArithmeticError):
    """A sample point is too close to a singular hyperplane."""


@dataclass(frozen=True)
class NumericConfig:
    K: int = 24            # Euler-Maclaurin terms
    M: int = 8             # direct summation range
    prune: float = 22.0    # drop pieces decaying faster than n^-prune
    log_tol: float = 1e-14
    margin: float = 1e-9

    def to_json(self) -> dict:
        return {"K": self.K, "M": self.M, "prune": self.prune}


@dataclass(frozen=True)
class NumVertex:
    """letter: ((label, weight), ...) merged decorations; children: subtrees."""

    letter: tuple
    children: tuple = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def ladder(word: Sequence) -> NumVertex:
    """The ladder whose root carries word[0] (outermost summation)."""
    node = None
    for letter in reversed(list(word)):
        node = NumVertex(tuple(letter), (node,) if node is not None else ())
    if node is None:
        raise ValueError("empty word")
    return node


def _to_ld(x: Fraction) -> np.longdouble:
    x = Fraction(x)
    return RT(str(x.numerator)) / RT(str(x.denominator))


_BCOEF: dict = {}


def _bernoulli_ld(k: int) -> np.longdouble:
    if k not in _BCOEF:
        _BCOEF[k] = _to_ld(bernoulli(k) / factorial(k))
    return _BCOEF[k]


def _falling_derivatives(e: np.ndarray, k: int, p: int) -> list:
    """[d^r/de^r (e (e-1) ... (e-k+1)) for r = 0..p]."""
    ders = [np.ones_like(e)] + [np.zeros_like(e) for _ in range(p)]
    for i in range(k):
        f = e - i
        new = [ders[0] * f]
        for r in range(1, p + 1):
            new.append(ders[r] * f + r * ders[r - 1])
        ders = new
    return ders


class _Evaluator:
    def __init__(self, betas: dict, lam: int, cfg: NumericConfig, npts: int):
        self.beta = betas
        self.lam = lam
        self.cfg = cfg
        self.npts = npts
        self.ns = np.arange(cfg.M + 1, dtype=RT)
        self.logn = np.log(np.maximum(self.ns, 1)).astype(RT)
        self._bS: dict = {frozenset(): np.zeros(npts, dtype=CT)}
        grow = sum(max(float(np.max(b.real)), 0.0) + 1.0 for b in betas.values())
        self.cut = cfg.prune + grow

    def beta_S(self, S: frozenset) -> np.ndarray:
        b = self._bS.get(S)
        if b is None:
            b = np.zeros(self.npts, dtype=CT)
            for v in S:
                b = b + self.beta[v]
            self._bS[S] = b
        return b

    def exponent(self, key) -> np.ndarray:
        S, j, _ = key
        return self.beta_S(S) + j

    def _put(self, pieces: dict, key, coef) -> None:
        if key in pieces:
            pieces[key] = pieces[key] + coef
        else:
            e = self.exponent(key)
            if float(np.max(e.real)) < -self.cut:
                return
            pieces[key] = coef

    def unit(self):
        values = np.ones((self.cfg.M + 1, self.npts), dtype=CT)
        return values, {(frozenset(), 0, 0): np.ones(self.npts, dtype=CT)}

    def multiply(self, a, b):
        va, pa = a
        vb, pb = b
        pieces: dict = {}
        for k1, c1 in pa.items():
            for k2, c2 in pb.items():
                key = (k1[0] | k2[0], k1[1] + k2[1], k1[2] + k2[2])
                self._put(pieces, key, c1 * c2)
        return va * vb, pieces

    def times_vertex(self, f, v: int):
        values, pieces = f
        b = self.beta[v]
        powers = np.exp(np.outer(self.logn, b))
        powers[0] = 0
        out: dict = {}
        for (S, j, p), c in pieces.items():
            self._put(out, (S | {v}, j, p), c)
        return values * powers, out

    def summation(self, f):
        """Weak (lam = +1) or strict (lam = -1) partial sums of f."""
        values, pieces = f
        cfg = self.cfg
        out: dict = {}
        for key, a in pieces.items():
            S, j, p = key
            e = self.exponent(key)
            d = np.abs(e + 1)
            if np.all(d < cfg.log_tol):
                self._put(out, (S, j + 1, p + 1), a / (p + 1))
            else:
                if np.any(d < cfg.margin):
                    raise ConditioningError("sample point too close to a pole hyperplane")
                inv = 1 / (e + 1)
                for i in range(p + 1):
                    q = p - i
                    c = comb(p, i) * (-1) ** q * factorial(q)
                    self._put(out, (S, j + 1, i), a * c * inv ** (q + 1))
            self._put(out, (S, j, p), a / 2)
            for k in range(2, cfg.K + 1, 2):
                ders = _falling_derivatives(e, k - 1, p)
                bk = _bernoulli_ld(k)
                for i in range(p + 1):
                    self._put(out, (S, j + 1 - k, i), a * (bk * comb(p, i)) * ders[p - i])
        cum = np.cumsum(values, axis=0)
        cum[0] = 0
        M = cfg.M
        const = cum[M] - self.at(out, M)
        out[(frozenset(), 0, 0)] = out.get((frozenset(), 0, 0), 0) + const
        if self.lam == -1:
            cum = cum - values
            for key, c in pieces.items():
                self._put(out, key, -c)
        return cum, out

    def at(self, pieces: dict, n: int) -> np.ndarray:
        ln = RT(np.log(RT(n)))
        total = np.zeros(self.npts, dtype=CT)
        for key, c in pieces.items():
            e = self.exponent(key)
            term = c * np.exp(e * ln)
            if key[2]:
                term = term * ln ** key[2]
            total = total + term
        return total

    def finite_part(self, pieces: dict) -> np.ndarray:
        total = np.zeros(self.npts, dtype=CT)
        for key, c in pieces.items():
            if key[2] == 0 and np.all(np.abs(self.exponent(key)) < self.cfg.log_tol):
                total = total + c
        return total

    def tree(self, vertex: NumVertex, ids: dict):
        f = self.unit()
        for child in vertex.children:
            f = self.multiply(f, self.tree(child, ids))
        return self.summation(self.times_vertex(f, ids[id(vertex)]))


def _assign(vertex: NumVertex, z: Mapping, npts: int, betas: dict, ids: dict) -> None:
    v = len(betas)
    ids[id(vertex)] = v
    b = np.zeros(npts, dtype=CT)
    for label, weight in vertex.letter:
        w = weight if isinstance(weight, (int, float, complex)) else _to_ld(Fraction(weight))
        zl = z.get(label)
        b = b - CT(w) + (np.asarray(zl, dtype=CT) if zl is not None else 0)
    betas[v] = b
    for c in vertex.children:
        _assign(c, z, npts, betas, ids)


def _npoints(z: Mapping) -> int:
    sizes = {np.size(v) for v in z.values()}
    if len(sizes) > 1:
        raise ValueError("all coordinates need the same number of sample points")
    return sizes.pop() if sizes else 1


def _broadcast(z: Mapping, npts: int) -> dict:
    return {k: np.broadcast_to(np.asarray(v, dtype=CT), (npts,)) for k, v in z.items()}


def forest_values(trees: Sequence[NumVertex], lam: int, z: Mapping,
                  cfg: NumericConfig = NumericConfig()) -> np.ndarray:
    """Regularised germ of a forest at the sample points z (label -> array).

    For a product of trees the finite part is the product of the finite
    parts; at generic points no other pair of pieces has total order 0.
    """
    if lam not in (-1, 1):
        raise ValueError("lambda must be -1 or +1")
    npts = _npoints(z)
    z = _broadcast(z, npts)
    total = np.ones(npts, dtype=CT)
    for t in trees:
        betas: dict = {}
        ids: dict = {}
        _assign(t, z, npts, betas, ids)
        ev = _Evaluator(betas, lam, cfg, npts)
        _, pieces = ev.tree(t, ids)
        total = total * ev.finite_part(pieces)
    return total


def word_values(word: Sequence, lam: int, z: Mapping,
                cfg: NumericConfig = NumericConfig()) -> np.ndarray:
    return forest_values([ladder(word)], lam, z, cfg)


def numeric_word_value(word: Sequence, z: Mapping | Sequence | None, lam: int,
                       cfg: NumericConfig = NumericConfig()) -> complex:
    """Value of the word germ at one point.

    word is a sequence of letters, each a sequence of (label, weight) pairs,
    outermost first; z maps labels to complex numbers (a sequence is read
    as z_1, z_2, ...).
    """
    if z is None:
        z = {}
    elif not isinstance(z, Mapping):
        z = {i + 1: v for i, v in enumerate(z)}
    z = {k: np.array([complex(v)], dtype=CT) for k, v in z.items()}
    if not z:
        z = {0: np.zeros(1, dtype=CT)}
    return complex(word_values(word, lam, z, cfg)[0])
