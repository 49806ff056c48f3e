"""Meromorphic germs at zero with linear poles.

A term is  (numerator + O(z^{t+1})) / (prod L_i^{m_i} * prod (1 + l_k)^{mu_k})
with homogeneous pole forms L_i (leading coefficient 1), affine units
normalised to constant 1, and a trusted numerator degree t (None: exact).
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping

from .algebra import LocalityAlgebra
from .linear import (IDENTITY, AffineForm, InnerProduct, LinearForm, Subspace,
                     linear_relation, orthogonal_complement,
                     solve_in_basis, spans_orthogonal)
from .numerics import CoeffPoly, FormalConstant


class PoleError(ValueError):
    """Evaluation on a pole hyperplane, or of a germ that is not holomorphic."""


class InsufficientDepth(ArithmeticError):
    """A truncated quantity was consumed beyond the degree it is known to."""


INF = float("inf")


def _nc(c):
    """Normalise a coefficient: rational CoeffPolys become Fractions."""
    if type(c) is Fraction:
        return c
    if isinstance(c, CoeffPoly):
        return c.rational_part() if c.is_rational() else c
    if isinstance(c, FormalConstant):
        return CoeffPoly.atom(c)
    return Fraction(c)


def coeff_low(c) -> int:
    """Vanishing order at 0 carried by unknown-function atoms of a coefficient."""
    if not isinstance(c, CoeffPoly):
        return 0
    return min((sum(e * a.vanishing_order for a, e in m if isinstance(a, FormalConstant))
                for m in c.terms), default=0)


def _coeff_parts(c) -> list:
    """Split a coefficient into (vanishing order, unknown support, part)."""
    if not isinstance(c, CoeffPoly):
        return [(0, frozenset(), c)]
    out = []
    for m, v in c.terms.items():
        order, support = 0, set()
        for a, e in m:
            if isinstance(a, FormalConstant) and a.is_unknown_function():
                order += e * a.vanishing_order
                support |= set(a.args[2])
        out.append((order, frozenset(support), _nc(CoeffPoly._raw({m: v}))))
    return out


def _tmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ---------------------------------------------------------------------------
# polynomials in z with rational or formal-constant coefficients


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms: dict = {}
        if terms:
            for m, c in terms.items():
                c = _nc(c)
                if c:
                    self.terms[m] = c

    @staticmethod
    def _raw(terms: dict) -> "Poly":
        p = Poly.__new__(Poly)
        p.terms = terms
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        c = _nc(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, i: int, c=1) -> "Poly":
        return cls._raw({((i, 1),): Fraction(c)})

    @classmethod
    def linear(cls, form: LinearForm) -> "Poly":
        return cls._raw({((i, 1),): c for i, c in form.items})

    @classmethod
    def affine(cls, form: AffineForm) -> "Poly":
        return cls.linear(form.linear) + cls.const(form.constant)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __add__(self, other: "Poly") -> "Poly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else _nc(s + c)
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(out)

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, s) -> "Poly":
        s = _nc(s)
        if not s:
            return Poly()
        return Poly._raw({m: v for m, c in self.terms.items() if (v := _nc(c * s))})

    def mul(self, other: "Poly", max_degree=None) -> "Poly":
        out: dict = {}
        right = [(m2, c2, mono_degree(m2)) for m2, c2 in other.terms.items()]
        for m1, c1 in self.terms.items():
            room = None if max_degree is None else max_degree - mono_degree(m1)
            for m2, c2, d2 in right:
                if room is not None and d2 > room:
                    continue
                m = _mono_mul(m1, m2)
                s = out.get(m)
                s = c1 * c2 if s is None else s + c1 * c2
                out[m] = s
        return Poly._raw({m: v for m, c in out.items() if (v := _nc(c))})

    __mul__ = mul

    def power(self, n: int, max_degree=None) -> "Poly":
        result = Poly.const(1)
        for _ in range(n):
            result = result.mul(self, max_degree)
        return result

    def degrees(self) -> list:
        return [mono_degree(m) for m in self.terms]

    def lowdeg(self):
        return min((mono_degree(m) for m in self.terms), default=INF)

    def weighted_lowdeg(self):
        """Lowest degree counting the vanishing order of unknown functions."""
        return min((mono_degree(m) + coeff_low(c) for m, c in self.terms.items()), default=INF)

    def maxdeg(self):
        return max((mono_degree(m) for m in self.terms), default=-INF)

    def truncate(self, max_degree) -> "Poly":
        if max_degree is None or max_degree == INF:
            return self
        return Poly._raw({m: c for m, c in self.terms.items() if mono_degree(m) <= max_degree})

    def homogeneous(self, d: int) -> "Poly":
        return Poly._raw({m: c for m, c in self.terms.items() if mono_degree(m) == d})

    def variables(self) -> set:
        return {i for m in self.terms for i, _ in m}

    def constant_term(self):
        return self.terms.get((), Fraction(0))

    def is_rational(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.terms.values())

    def evaluate(self, point: Mapping):
        total = Fraction(0)
        for m, c in self.terms.items():
            v = Fraction(1)
            for i, e in m:
                v *= Fraction(point[i]) ** e
            total = total + c * v
        return _nc(total)

    def substitute(self, images: Mapping[int, "Poly"], max_degree=None) -> "Poly":
        """Replace each variable by a polynomial (variables absent from the
        mapping are kept)."""
        cache: dict = {}

        def pw(i, e):
            key = (i, e)
            if key not in cache:
                base = images.get(i)
                if base is None:
                    cache[key] = Poly._raw({((i, e),): Fraction(1)})
                elif e == 1:
                    cache[key] = base
                else:
                    cache[key] = pw(i, e - 1).mul(base, max_degree)
            return cache[key]

        out: dict = {}
        for m, c in self.terms.items():
            acc = Poly.const(c)
            for i, e in m:
                acc = acc.mul(pw(i, e), max_degree)
            for k, v in acc.terms.items():
                out[k] = out[k] + v if k in out else v
        return Poly._raw({k: v for k, c in out.items() if (v := _nc(c))})

    def rename(self, mapping: Mapping[int, int]) -> "Poly":
        out: dict = {}
        for m, c in self.terms.items():
            nm = tuple(sorted((mapping.get(i, i), e) for i, e in m))
            out[nm] = out[nm] + c if nm in out else c
        return Poly(out)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: (mono_degree(kv[0]), kv[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(f"z{i}" if e == 1 else f"z{i}^{e}" for i, e in m)
            cs = str(c)
            if not mono:
                parts.append(cs if isinstance(c, Fraction) else f"({cs})")
            elif c == 1:
                parts.append(mono)
            else:
                parts.append((cs if isinstance(c, Fraction) else f"({cs})") + "*" + mono)
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self) -> list:
        return [[[list(ie) for ie in m], _coeff_json(c)] for m, c in self.sorted_terms()]

    @staticmethod
    def from_json(data) -> "Poly":
        out: dict = {}
        for m, c in data:
            mono = tuple(sorted((int(i), int(e)) for i, e in m))
            out[mono] = _coeff_from_json(c)
        return Poly(out)


@lru_cache(maxsize=1 << 16)
def mono_degree(m) -> int:
    return sum(e for _, e in m)


@lru_cache(maxsize=1 << 18)
def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for i, e in m2:
        d[i] = d.get(i, 0) + e
    return tuple(sorted(d.items()))


def _coeff_json(c):
    return str(c) if isinstance(c, Fraction) else c.to_json()


def _coeff_from_json(c):
    return Fraction(c) if isinstance(c, str) else _nc(CoeffPoly.from_json(c))


# ---------------------------------------------------------------------------
# germs


def _merge(pairs: Iterable, extra: Iterable) -> tuple:
    d: dict = {}
    for f, m in pairs:
        d[f] = d.get(f, 0) + m
    for f, m in extra:
        d[f] = d.get(f, 0) + m
    return tuple(sorted(((f, m) for f, m in d.items() if m), key=lambda fm: fm[0].sort_key()))


def _pole_degree(poles) -> int:
    return sum(m for _, m in poles)


class GermTerm:
    __slots__ = ("num", "poles", "units", "trusted")

    def __init__(self, num: Poly, poles: tuple = (), units: tuple = (), trusted=None):
        self.num = num
        self.poles = poles
        self.units = units
        self.trusted = trusted

    @property
    def pole_degree(self) -> int:
        return _pole_degree(self.poles)

    def __repr__(self) -> str:
        return f"GermTerm({self.num}, poles={self.poles}, units={self.units}, trusted={self.trusted})"


class Germ:
    """Finite sum of GermTerms, keyed by (poles, units)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[GermTerm] = ()):
        self.terms: dict = {}
        for t in terms:
            self._add_term(t.poles, t.units, t.num, t.trusted)

    def _add_term(self, poles, units, num: Poly, trusted) -> None:
        key = (poles, units)
        if trusted is not None:
            num = num.truncate(trusted)
        old = self.terms.get(key)
        if old is not None:
            num = old[0] + num
            trusted = _tmin(old[1], trusted)
            if trusted is not None:
                num = num.truncate(trusted)
        if num or trusted is not None:
            self.terms[key] = (num, trusted)
        else:
            self.terms.pop(key, None)

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls) -> "Germ":
        return cls()

    @classmethod
    def one(cls) -> "Germ":
        return cls.const(1)

    @classmethod
    def const(cls, c) -> "Germ":
        return cls.polynomial(Poly.const(c))

    @classmethod
    def var(cls, i: int) -> "Germ":
        return cls.polynomial(Poly.var(i))

    @classmethod
    def polynomial(cls, p: Poly, trusted=None) -> "Germ":
        g = cls()
        g._add_term((), (), p, trusted)
        return g

    @classmethod
    def unknown(cls, trusted: int, poles: Iterable = ()) -> "Germ":
        """A term whose numerator is only known to vanish up to degree trusted."""
        return cls.term(Poly(), poles, (), trusted)

    @classmethod
    def term(cls, num, poles: Iterable = (), units: Iterable = (), trusted=None) -> "Germ":
        """num / (prod L^m * prod A^mu) with arbitrary nonzero forms."""
        if not isinstance(num, Poly):
            num = Poly.const(num)
        scale = Fraction(1)
        ps = []
        for L, m in poles:
            if not isinstance(L, LinearForm):
                raise TypeError("poles must be homogeneous linear forms")
            if L.is_zero():
                raise PoleError("zero pole form")
            c, Ln = L.normalized()
            scale /= c ** m
            ps.append((Ln, m))
        us = []
        for A, mu in units:
            if not isinstance(A, AffineForm) or A.constant == 0:
                raise ValueError("units must be affine forms with nonzero constant")
            scale /= A.constant ** mu
            if not A.linear.is_zero():
                us.append((A.linear * (1 / A.constant), mu))
        g = cls()
        g._add_term(_merge(ps, ()), _merge(us, ()), num.scale(scale), trusted)
        return g

    @classmethod
    def pole(cls, L: LinearForm, m: int = 1) -> "Germ":
        return cls.term(Poly.const(1), [(L, m)])

    @classmethod
    def reciprocal(cls, A: AffineForm | LinearForm) -> "Germ":
        """1/A for an affine form: a unit, a pole, or a rational constant."""
        if isinstance(A, LinearForm):
            A = AffineForm(A, Fraction(0))
        if A.constant:
            return cls.term(Poly.const(1), (), [(A, 1)])
        if A.linear.is_zero():
            raise ZeroDivisionError("reciprocal of the zero form")
        return cls.pole(A.linear)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other) -> "Germ":
        other = as_germ(other)
        out = Germ()
        out.terms = dict(self.terms)
        for (p, u), (n, t) in other.terms.items():
            out._add_term(p, u, n, t)
        return out

    __radd__ = __add__

    def __neg__(self) -> "Germ":
        out = Germ()
        out.terms = {k: (-n, t) for k, (n, t) in self.terms.items()}
        return out

    def __sub__(self, other) -> "Germ":
        return self + (-as_germ(other))

    def __rsub__(self, other) -> "Germ":
        return as_germ(other) - self

    def scale(self, s) -> "Germ":
        s = _nc(s)
        if not s and not any(t is not None for _, t in self.terms.values()):
            return Germ()
        out = Germ()
        for (p, u), (n, t) in self.terms.items():
            out._add_term(p, u, n.scale(s), t)
        return out

    def __mul__(self, other) -> "Germ":
        if isinstance(other, (int, Fraction, CoeffPoly, FormalConstant)):
            return self.scale(other)
        out = Germ()
        for (p1, u1), (n1, t1) in self.terms.items():
            low1 = _true_low(n1, t1)
            for (p2, u2), (n2, t2) in other.terms.items():
                low2 = _true_low(n2, t2)
                t = None
                if t1 is not None:
                    t = t1 + low2
                if t2 is not None:
                    t = _tmin(t, t2 + low1)
                if t == INF:
                    t = None
                if t is not None and t == -INF:
                    raise InsufficientDepth("product of two unknown quantities")
                if t is not None:
                    t = int(t)
                n = n1.mul(n2, t)
                if not n and t is None:
                    continue
                out._add_term(_merge(p1, p2), _merge(u1, u2), n, t)
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Germ":
        out = Germ.one()
        for _ in range(n):
            out = out * self
        return out

    # -- queries -----------------------------------------------------------
    def term_list(self) -> list[GermTerm]:
        return [GermTerm(n, p, u, t) for (p, u), (n, t) in self.terms.items()]

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_exact(self) -> bool:
        return all(t is None for _, t in self.terms.values())

    def is_polynomial(self) -> bool:
        return all(not p and not u for p, u in self.terms)

    def has_units(self) -> bool:
        return any(u for _, u in self.terms)

    def variables(self) -> set:
        out: set = set()
        for (p, u), (n, _) in self.terms.items():
            out |= n.variables()
            for L, _ in p + u:
                out |= set(L.support())
        return out

    def constants(self) -> set:
        out: set = set()
        for n, _ in self.terms.values():
            for c in n.terms.values():
                if isinstance(c, CoeffPoly):
                    out |= c.constants()
        return out

    def low_homogeneity(self):
        """Lowest homogeneity degree that can occur (INF for the zero germ)."""
        lo = INF
        for (p, _), (n, t) in self.terms.items():
            low = n.weighted_lowdeg()
            if t is not None:
                low = min(low, t + 1)
            lo = min(lo, low - _pole_degree(p))
        return lo

    def trusted_homogeneity(self):
        """Homogeneity degree up to which every term is known exactly."""
        out = INF
        for (p, _), (n, t) in self.terms.items():
            if t is not None:
                out = min(out, t - _pole_degree(p))
        return out

    def truncate_homogeneity(self, h: int) -> "Germ":
        """Drop everything of homogeneity above h (marking it untrusted)."""
        out = Germ()
        for (p, u), (n, t) in self.terms.items():
            limit = h + _pole_degree(p)
            out._add_term(p, u, n.truncate(limit), _tmin(t, limit))
        return out

    def rename(self, mapping: Mapping[int, int]) -> "Germ":
        out = Germ()
        for (p, u), (n, t) in self.terms.items():
            ps = [(_rename_form(L, mapping), m) for L, m in p]
            us = [(AffineForm(_rename_form(L, mapping), Fraction(1)), m) for L, m in u]
            out = out + Germ.term(n.rename(mapping), ps, us, t)
        return out

    def __repr__(self) -> str:
        return f"Germ({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (p, u), (n, t) in sorted(self.terms.items(), key=_term_sort_key):
            s = f"({n})"
            if t is not None:
                s = f"({n} + O(z^{t + 1}))"
            den = [f"({L})" + (f"^{m}" if m > 1 else "") for L, m in p]
            den += [f"(1 + {L})" + (f"^{m}" if m > 1 else "") for L, m in u]
            if den:
                s += "/" + "".join(den)
            parts.append(s)
        return " + ".join(parts)

    # -- serialisation -----------------------------------------------------
    def to_json(self) -> dict:
        out = []
        for (p, u), (n, t) in sorted(self.terms.items(), key=_term_sort_key):
            out.append({
                "num": n.to_json(),
                "poles": [[L.to_json(), m] for L, m in p],
                "units": [[L.to_json(), "1", m] for L, m in u],
                "trusted_degree": t,
            })
        return {"terms": out}

    @staticmethod
    def from_json(data: Mapping) -> "Germ":
        g = Germ()
        for term in data["terms"]:
            poles = [(LinearForm.from_json(f), int(m)) for f, m in term["poles"]]
            units = [(AffineForm(LinearForm.from_json(f), Fraction(c)), int(m))
                     for f, c, m in term["units"]]
            t = term.get("trusted_degree")
            g = g + Germ.term(Poly.from_json(term["num"]), poles, units, t)
        return g


def _term_sort_key(item):
    (p, u), _ = item
    return (tuple((L.sort_key(), m) for L, m in p), tuple((L.sort_key(), m) for L, m in u))


def _rename_form(L: LinearForm, mapping: Mapping[int, int]) -> LinearForm:
    return LinearForm({mapping.get(i, i): c for i, c in L.items})


def _true_low(n: Poly, t):
    low = n.lowdeg()
    if t is not None:
        low = min(low, t + 1)
    return low


def as_germ(x) -> Germ:
    if isinstance(x, Germ):
        return x
    if isinstance(x, Poly):
        return Germ.polynomial(x)
    if isinstance(x, FormalConstant):
        return Germ.const(CoeffPoly.atom(x))
    return Germ.const(x)


def germ_add(a: Germ, b: Germ) -> Germ:
    return a + b


def germ_mul(a: Germ, b: Germ) -> Germ:
    return a * b


# ---------------------------------------------------------------------------
# support and independence


def dependence_support(g: Germ) -> Subspace:
    forms = [LinearForm.var(i) for i in sorted(
        {i for n, _ in g.terms.values() for i in n.variables()})]
    for p, u in g.terms:
        forms.extend(L for L, _ in p)
        forms.extend(L for L, _ in u)
    return Subspace(forms)


def independent(Q: InnerProduct, g1: Germ, g2: Germ) -> bool:
    return spans_orthogonal(Q, dependence_support(g1), dependence_support(g2))


# ---------------------------------------------------------------------------
# unit expansion and partial fractions


def _geometric(L: LinearForm, mu: int, max_degree: int) -> Poly:
    """(1 + L)^{-mu} up to total degree max_degree."""
    if max_degree < 0:
        return Poly()
    lin = Poly.linear(L)
    out = Poly()
    power = Poly.const(1)
    for k in range(max_degree + 1):
        # binomial(-mu, k) = (-1)^k C(mu + k - 1, k)
        out = out + power.scale((-1) ** k * comb(mu + k - 1, k))
        power = power.mul(lin, max_degree)
    return out


def expand_units(g: Germ, degree: int) -> Germ:
    """Replace unit factors by their geometric series, exact up to
    homogeneity degree `degree` (the result is marked trusted to there)."""
    if not g.has_units():
        return g
    out = Germ()
    for (p, u), (n, t) in g.terms.items():
        if not u:
            out._add_term(p, u, n, t)
            continue
        limit = degree + _pole_degree(p)
        low = n.lowdeg()
        if low == INF:
            out._add_term(p, (), Poly(), _tmin(t, limit))
            continue
        series = Poly.const(1)
        for L, mu in u:
            series = series.mul(_geometric(L, mu, limit - int(low)), limit - int(low))
        out._add_term(p, (), n.mul(series, limit), _tmin(t, limit))
    return out


def partial_fraction_reduce(g: Germ) -> Germ:
    """Rewrite every term so that its pole forms are linearly independent."""
    out = Germ()
    for (poles, units), (num, t) in g.terms.items():
        stack = [(dict(poles), Fraction(1))]
        while stack:
            pd, c = stack.pop()
            forms = sorted(pd, key=lambda L: L.sort_key())
            rel = linear_relation(forms) if len(forms) > 1 else None
            if rel is None:
                out._add_term(_merge(pd.items(), ()), units, num.scale(c), t)
                continue
            k = max(i for i, r in enumerate(rel) if r)
            Lk = forms[k]
            # 1 = sum_{j != k} (-c_j / c_k) L_j / L_k
            for j, r in enumerate(rel):
                if j == k or not r:
                    continue
                nd = dict(pd)
                Lj = forms[j]
                nd[Lj] -= 1
                if not nd[Lj]:
                    del nd[Lj]
                nd[Lk] = nd.get(Lk, 0) + 1
                stack.append((nd, c * (-r / rel[k])))
    return out


# ---------------------------------------------------------------------------
# the Q-orthogonal splitting into holomorphic and polar parts


def _split_term(Q: InnerProduct, num: Poly, poles: tuple, t, holo: Germ, polar: Germ) -> None:
    """Split num / prod L^m (independent poles) into holo + polar parts."""
    if not poles:
        holo._add_term((), (), num, t)
        return
    pd = _pole_degree(poles)
    forms = [L for L, _ in poles]
    clean: dict = {}
    worst = None
    for m, c in num.terms.items():
        for order, support, part in _coeff_parts(c):
            if support and not _orthogonal_to(Q, support, forms):
                # an unknown function not constant along the poles: only its
                # homogeneity bound survives the splitting
                h = mono_degree(m) + order - pd
                worst = h if worst is None else min(worst, h)
            else:
                clean[m] = _nc(clean[m] + part) if m in clean else part
    if worst is not None:
        holo._add_term((), (), Poly(), worst - 1)
        polar._add_term(poles, (), Poly(), worst - 1 + pd)
        num = Poly(clean)
    mults = [m for _, m in poles]
    r = len(forms)
    ambient = set(num.variables())
    for L in forms:
        ambient |= set(L.support())
    comp = orthogonal_complement(Q, Subspace(forms), ambient).spanning
    basis = list(forms) + list(comp)
    # variables Q-orthogonal to every pole already live in the complement
    # and are left in place
    variables = [i for i in sorted(num.variables())
                 if not _orthogonal_to(Q, (i,), forms)]
    # basis coordinate b is carried by the temporary variable -(b + 1)
    rewritten = _to_basis(tuple(basis), tuple(variables)).apply(num)
    groups: dict = {}
    for m, c in rewritten.terms.items():
        pexp = [0] * r
        rest = []
        for v, e in m:
            b = -v - 1
            if v > 0:
                rest.append((v, e))
            elif b < r:
                pexp[b] = e
            else:
                rest.append((v, e))
        key = tuple(pexp)
        groups.setdefault(key, {})[tuple(rest)] = c
    back = _from_basis(tuple(basis))
    h_trust = None if t is None else t - pd
    for pexp, rest in groups.items():
        rem = [p - m for p, m in zip(pexp, mults)]
        new_poles = tuple((forms[i], -e) for i, e in enumerate(rem) if e < 0)
        numer_pows = {-(i + 1): e for i, e in enumerate(rem) if e > 0}
        if not new_poles:
            mono = tuple(sorted(numer_pows.items()))
            part = Poly._raw({_mono_mul(mono, k): c for k, c in rest.items()})
            holo._add_term((), (), back.apply(part), h_trust)
            continue
        part = back.apply(Poly._raw(dict(rest)))
        npd = _pole_degree(new_poles)
        sub_t = None if t is None else t - pd + npd
        if not numer_pows:
            polar._add_term(_merge(new_poles, ()), (), part, sub_t)
            continue
        mono = back.image(tuple(sorted(numer_pows.items())))
        _split_term(Q, mono.mul(part), _merge(new_poles, ()), sub_t, holo, polar)
    if t is not None:
        # the unknown remainder has homogeneity > t - pd on both sides
        holo._add_term((), (), Poly(), h_trust)
        polar._add_term(poles, (), Poly(), t)


class _Substitution:
    """Variable -> polynomial substitution with memoised monomial images."""

    def __init__(self, images: dict):
        self.images = images
        self.memo: dict = {(): Poly.const(1)}

    def image(self, mono: tuple) -> Poly:
        hit = self.memo.get(mono)
        if hit is None:
            i, e = mono[-1]
            base = self.images.get(i)
            if base is None:
                last = Poly._raw({((i, e),): Fraction(1)})
            else:
                last = base.power(e)
            hit = self.image(mono[:-1]).mul(last)
            self.memo[mono] = hit
        return hit

    def apply(self, p: Poly) -> Poly:
        out: dict = {}
        for m, c in p.terms.items():
            for k, v in self.image(m).terms.items():
                v = c * v
                out[k] = out[k] + v if k in out else v
        return Poly._raw({k: v for k, c in out.items() if (v := _nc(c))})


@lru_cache(maxsize=2048)
def _to_basis(basis: tuple, variables: tuple) -> _Substitution:
    coords = solve_in_basis(basis, [LinearForm.var(i) for i in variables]) if variables else []
    return _Substitution({i: Poly._raw({((-(b + 1), 1),): c for b, c in enumerate(x) if c})
                          for i, x in zip(variables, coords)})


@lru_cache(maxsize=2048)
def _from_basis(basis: tuple) -> _Substitution:
    return _Substitution({-(b + 1): Poly.linear(f) for b, f in enumerate(basis)})


def _orthogonal_to(Q: InnerProduct, support, forms) -> bool:
    if Q.is_identity:
        return not any(i in L.support() for i in support for L in forms)
    return all(sum(Q.value(i, j) * c for j, c in L.items) == 0 for i in support for L in forms)


def decompose(Q: InnerProduct, g: Germ, degree: int = 0) -> tuple[Germ, Germ]:
    """(pi_+ g, pi_- g).  Unit factors are expanded first, exactly up to
    homogeneity `degree`."""
    holo, polar = Germ(), Germ()
    reduced = partial_fraction_reduce(expand_units(g, degree))
    for (poles, _), (num, t) in reduced.terms.items():
        h, p = _split_cached(Q, poles, frozenset(num.terms.items()), t)
        for part, acc in ((h, holo), (p, polar)):
            for (pp, uu), (n, tt) in part.terms.items():
                acc._add_term(pp, uu, n, tt)
    return holo, polar


@lru_cache(maxsize=8192)
def _split_cached(Q: InnerProduct, poles: tuple, num_items: frozenset, t) -> tuple:
    holo, polar = Germ(), Germ()
    _split_term(Q, Poly._raw(dict(num_items)), poles, t, holo, polar)
    return holo, polar


def _check_depth(g: Germ) -> None:
    for (p, _), (_, t) in g.terms.items():
        if t is not None and t < _pole_degree(p):
            raise InsufficientDepth(
                f"numerator known to degree {t} but pole degree is {_pole_degree(p)}")


def project_plus(Q: InnerProduct, g: Germ, degree: int = 0, strict: bool = True) -> Germ:
    if strict:
        _check_depth(g)
    return decompose(Q, g, degree)[0]


def project_minus(Q: InnerProduct, g: Germ, degree: int = 0, strict: bool = True) -> Germ:
    if strict:
        _check_depth(g)
    return decompose(Q, g, degree)[1]


# ---------------------------------------------------------------------------
# evaluation


def evaluate_zero(g: Germ, Q: InnerProduct = IDENTITY):
    """Value at 0 of a germ that is holomorphic there."""
    if g.is_polynomial():
        holo, polar = g, Germ()
    else:
        holo, polar = decompose(Q, g, 0)
    for (p, _), (n, t) in polar.terms.items():
        if n and not (t is not None and t < _pole_degree(p)):
            raise PoleError("germ is not holomorphic at zero")
    total = Fraction(0)
    for (p, u), (n, t) in holo.terms.items():
        if t is not None and t < 0:
            raise InsufficientDepth("constant term is not known")
        for order, _, part in _coeff_parts(n.constant_term()):
            if order == 0:
                total = total + part
    return _nc(total)


def _as_point(z) -> dict:
    if isinstance(z, Mapping):
        return {int(k): Fraction(v) for k, v in z.items()}
    return {i + 1: Fraction(v) for i, v in enumerate(z)}


def evaluate_point(g: Germ, z) -> object:
    """Exact value at a rational point off the pole hyperplanes (the known
    part of truncated numerators)."""
    point = _as_point(z)
    total = Fraction(0)
    for (p, u), (n, _) in g.terms.items():
        den = Fraction(1)
        for L, m in p:
            v = L({i: point.get(i, 0) for i in L.support()})
            if v == 0:
                raise PoleError(f"point lies on the pole {L} = 0")
            den *= v ** m
        for L, m in u:
            v = 1 + L({i: point.get(i, 0) for i in L.support()})
            if v == 0:
                raise PoleError(f"point lies on the pole of 1/(1 + {L})")
            den *= v ** m
        total = total + n.evaluate(_Defaults(point)) / den
    return _nc(total)


class _Defaults(dict):
    def __missing__(self, key):
        return Fraction(0)


def homogeneous_components(g: Germ, z, upto: int) -> dict:
    """{d: g_d(z)} for homogeneity degrees d <= upto."""
    point = _Defaults(_as_point(z))
    g = expand_units(g, upto)
    out: dict = {}
    for (p, _), (n, _) in g.terms.items():
        pd = _pole_degree(p)
        den = Fraction(1)
        for L, m in p:
            v = L({i: point[i] for i in L.support()})
            if v == 0:
                raise PoleError(f"point lies on the pole {L} = 0")
            den *= v ** m
        for m, c in n.terms.items():
            v = Fraction(1)
            for i, e in m:
                v *= point[i] ** e
            for order, _, part in _coeff_parts(c):
                d = mono_degree(m) + order - pd
                if d <= upto:
                    out[d] = _nc(out.get(d, 0) + part * v / den)
    return {d: v for d, v in out.items() if v}


def _random_point(g: Germ, rng: random.Random) -> dict:
    vs = sorted(g.variables())
    forms = [L for p, _ in g.terms for L, _ in p]
    units = [L for _, u in g.terms for L, _ in u]
    for _ in range(100):
        pt = {i: Fraction(rng.randint(-40, 40), rng.randint(1, 9)) for i in vs}
        if all(L({i: pt[i] for i in L.support()}) != 0 for L in forms) and \
                all(L({i: pt[i] for i in L.support()}) != -1 for L in units):
            return pt
    raise RuntimeError("could not find a point off the pole hyperplanes")


def germ_equal(g1: Germ, g2, trials: int = 3, seed: int = 0, upto=None) -> bool:
    """Equality as germs, up to the homogeneity both are trusted to (and up
    to `upto` if given).

    Compares homogeneous components exactly at random rational points;
    formal constants are treated as independent indeterminates.
    """
    diff = g1 - as_germ(g2)
    if not diff.terms:
        return True
    rng = random.Random(seed)
    limit = diff.trusted_homogeneity()
    if upto is not None:
        limit = min(limit, upto)
    if limit == INF:
        for _ in range(trials):
            if evaluate_point(diff, _random_point(diff, rng)):
                return False
        return True
    for _ in range(trials):
        if homogeneous_components(diff, _random_point(diff, rng), int(limit)):
            return False
    return True


def is_holomorphic(g: Germ, Q: InnerProduct = IDENTITY) -> bool:
    return germ_equal(decompose(Q, g, 0)[1], Germ())


# ---------------------------------------------------------------------------
# germs as a locality algebra


class GermAlgebra(LocalityAlgebra):
    """Germs under Q-orthogonality of dependence subspaces; the operator is
    pi_- (weight -1)."""

    weight = -1

    def __init__(self, Q: InnerProduct = IDENTITY):
        self.Q = Q
        self.unit = Germ.one()

    def independent(self, a: Germ, b: Germ) -> bool:
        return independent(self.Q, a, b)

    def product(self, a: Germ, b: Germ) -> Germ:
        return a * b

    def add(self, a: Germ, b: Germ) -> Germ:
        return a + b

    def scale(self, a: Germ, c) -> Germ:
        return a.scale(c)

    def operator(self, g: Germ) -> Germ:
        return project_minus(self.Q, g)

    def sort_key(self, g: Germ):
        return str(g.to_json())

    def equal(self, a: Germ, b: Germ) -> bool:
        return germ_equal(a, b)
