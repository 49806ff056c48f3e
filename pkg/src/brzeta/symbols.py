"""Germs of polyhomogeneous symbols on [1, oo) with meromorphic coefficients.

A symbol is a finite sum of pieces c(z) x^{alpha(z)} plus an optional tail,
a remainder of known order that is never evaluated.  Coefficients may carry
factors zeta(a(z)) that are only expanded into germs at the end.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping, Sequence

from .algebra import LocalityAlgebra, LocalityError
from .germs import (INF, Germ, InsufficientDepth, Poly, as_germ, dependence_support,
                    evaluate_point)
from .linear import (IDENTITY, AffineForm, InnerProduct, LinearForm, Subspace,
                     spans_orthogonal)
from .numerics import (EULER_GAMMA, CoeffPoly, bernoulli, chi_moment,
                       faulhaber_polynomial, stieltjes, unknown_function, zeta_at,
                       zeta_at_nonpositive, zeta_deriv)


def _digest(*parts) -> str:
    return hashlib.sha1("|".join(map(str, parts)).encode()).hexdigest()[:12]


def _factor_low(arg: AffineForm) -> int:
    return -1 if arg.constant == 1 else 0


def zeta_constant(a: Fraction):
    """zeta(a) for a constant argument: rational for a <= 0, formal for a >= 2."""
    if a.denominator != 1:
        raise ValueError(f"zeta at non-integer constant argument {a}")
    a = int(a)
    if a == 1:
        raise ZeroDivisionError("zeta has a pole at 1")
    if a <= 0:
        return zeta_at_nonpositive(-a)
    return CoeffPoly.atom(zeta_at(a))


# ---------------------------------------------------------------------------
# coefficients with zeta factors


class ZetaCoefficient:
    """sum over keys of base_germ * prod zeta(a(z)); keys are sorted tuples of
    affine arguments with nonzero linear part."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms: dict = {}
        if terms:
            for k, g in terms.items():
                self._add(k, g)

    def _add(self, key, g: Germ) -> None:
        old = self.terms.get(key)
        g = g if old is None else old + g
        if g.terms:
            self.terms[key] = g
        else:
            self.terms.pop(key, None)

    @classmethod
    def coerce(cls, x) -> "ZetaCoefficient":
        if isinstance(x, ZetaCoefficient):
            return x
        return cls({(): as_germ(x)})

    @classmethod
    def zeta(cls, arg: AffineForm) -> "ZetaCoefficient":
        if arg.linear.is_zero():
            return cls.coerce(zeta_constant(arg.constant))
        return cls({(arg,): Germ.one()})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other) -> "ZetaCoefficient":
        other = ZetaCoefficient.coerce(other)
        out = ZetaCoefficient()
        out.terms = dict(self.terms)
        for k, g in other.terms.items():
            out._add(k, g)
        return out

    __radd__ = __add__

    def __neg__(self) -> "ZetaCoefficient":
        out = ZetaCoefficient()
        out.terms = {k: -g for k, g in self.terms.items()}
        return out

    def __sub__(self, other) -> "ZetaCoefficient":
        return self + (-ZetaCoefficient.coerce(other))

    def __mul__(self, other) -> "ZetaCoefficient":
        if not isinstance(other, ZetaCoefficient):
            g = as_germ(other)
            out = ZetaCoefficient()
            for k, b in self.terms.items():
                out._add(k, b * g)
            return out
        out = ZetaCoefficient()
        for k1, b1 in self.terms.items():
            for k2, b2 in other.terms.items():
                key = tuple(sorted(k1 + k2, key=lambda a: a.sort_key()))
                out._add(key, b1 * b2)
        return out

    __rmul__ = __mul__

    def low_homogeneity(self):
        return min((g.low_homogeneity() + sum(_factor_low(a) for a in k)
                    for k, g in self.terms.items()), default=INF)

    def has_poles(self) -> bool:
        for k, g in self.terms.items():
            if any(a.constant == 1 for a in k) or any(p for p, _ in g.terms):
                return True
        return False

    def truncate_homogeneity(self, h: int) -> "ZetaCoefficient":
        out = ZetaCoefficient()
        for k, g in self.terms.items():
            out._add(k, g.truncate_homogeneity(h - sum(_factor_low(a) for a in k)))
        return out

    def variables(self) -> set:
        out: set = set()
        for k, g in self.terms.items():
            out |= g.variables()
            for a in k:
                out |= set(a.linear.support())
        return out

    def support_forms(self) -> list:
        forms: list = []
        for k, g in self.terms.items():
            forms.extend(dependence_support(g).spanning)
            forms.extend(a.linear for a in k)
        return forms

    def expand(self, target: int) -> Germ:
        return zeta_expand(self, target)

    def evaluate_point(self, z) -> object:
        total = Fraction(0)
        for k, g in self.terms.items():
            v = evaluate_point(g, z)
            for a in k:
                point = {i + 1: Fraction(x) for i, x in enumerate(z)} \
                    if not isinstance(z, Mapping) else z
                arg = a.linear({i: point.get(i, 0) for i in a.linear.support()}) + a.constant
                v = v * zeta_constant(Fraction(arg))
            total = total + v
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, g in sorted(self.terms.items(), key=lambda kv: [a.sort_key() for a in kv[0]]):
            s = f"[{g}]"
            for a in k:
                s += f"*zeta({a})"
            parts.append(s)
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self) -> list:
        return [{"zeta": [a.to_json() for a in k], "base": g.to_json()}
                for k, g in sorted(self.terms.items(),
                                   key=lambda kv: [a.sort_key() for a in kv[0]])]

    @staticmethod
    def from_json(data) -> "ZetaCoefficient":
        out = ZetaCoefficient()
        for item in data:
            key = tuple(sorted((AffineForm.from_json(a) for a in item["zeta"]),
                               key=lambda a: a.sort_key()))
            out._add(key, Germ.from_json(item["base"]))
        return out


def _zeta_factor_germ(arg: AffineForm, degree: int) -> Germ:
    """Laurent/Taylor germ of zeta(arg(z)), exact up to homogeneity degree."""
    a0 = arg.constant
    if a0.denominator != 1:
        raise ValueError(f"zeta argument {arg} has a non-integer constant part")
    a0 = int(a0)
    ell = Poly.linear(arg.linear)
    if a0 == 1:
        # zeta(1 + l) = 1/l + sum_n (-1)^n gamma_n / n! l^n
        g = Germ.pole(arg.linear)
        if degree < 0:
            return g + Germ.unknown(degree)
        series = Poly()
        power = Poly.const(1)
        for n in range(degree + 1):
            const = EULER_GAMMA if n == 0 else stieltjes(n)
            series = series + power.scale(CoeffPoly.atom(const) * Fraction((-1) ** n, factorial(n)))
            power = power.mul(ell)
        return g + Germ.polynomial(series, degree)
    if degree < 0:
        return Germ.unknown(degree)
    lead = zeta_constant(Fraction(a0))
    series = Poly.const(lead)
    power = ell
    for k in range(1, degree + 1):
        series = series + power.scale(CoeffPoly.atom(zeta_deriv(k, a0)) * Fraction(1, factorial(k)))
        power = power.mul(ell)
    return Germ.polynomial(series, degree)


def zeta_expand(c: ZetaCoefficient, target_degree: int) -> Germ:
    """Expand all zeta factors; the result is exact up to target homogeneity."""
    out = Germ()
    for key, base in c.terms.items():
        lows = [_factor_low(a) for a in key]
        base_low = base.low_homogeneity()
        if base_low == INF:
            continue
        total_low = base_low + sum(lows)
        if total_low > target_degree:
            out = out + Germ.unknown(target_degree)
            continue
        g = base.truncate_homogeneity(target_degree - sum(lows))
        for i, a in enumerate(key):
            rest = total_low - lows[i]
            g = g * _zeta_factor_germ(a, int(target_degree - rest))
        out = out + g.truncate_homogeneity(target_degree)
    return out


# ---------------------------------------------------------------------------
# symbols


def is_admissible(order: AffineForm) -> bool:
    if not order.linear.is_zero():
        return True
    return order.constant.denominator == 1 and order.constant >= 0


@dataclass(frozen=True)
class Tail:
    """A discarded remainder of order <= order_bound whose coefficient has
    homogeneity >= degree and depends only on the variables in support."""

    order_bound: AffineForm
    degree: int
    holomorphic: bool
    support: frozenset
    label: str

    def times(self, order: AffineForm, coeff: ZetaCoefficient) -> "Tail | None":
        low = coeff.low_homogeneity()
        if low == INF:
            return None
        return Tail(self.order_bound + order, int(self.degree + low),
                    self.holomorphic and not coeff.has_poles(),
                    self.support | frozenset(coeff.variables()) | order.linear.support(),
                    _digest(self.label, "x", order, coeff))

    def to_json(self) -> dict:
        return {"order_bound": self.order_bound.to_json(), "degree": self.degree,
                "holomorphic": self.holomorphic, "support": sorted(self.support),
                "label": self.label}

    @staticmethod
    def from_json(d) -> "Tail":
        return Tail(AffineForm.from_json(d["order_bound"]), int(d["degree"]),
                    bool(d["holomorphic"]), frozenset(d["support"]), d["label"])


def merge_tails(a: Tail | None, b: Tail | None) -> Tail | None:
    if a is None:
        return b
    if b is None:
        return a
    if a.order_bound == b.order_bound:
        bound = a.order_bound
    elif a.order_bound.constant != b.order_bound.constant:
        bound = max(a.order_bound, b.order_bound, key=lambda f: f.constant)
    else:
        bound = AffineForm.const(a.order_bound.constant)
    return Tail(bound, min(a.degree, b.degree), a.holomorphic and b.holomorphic,
                a.support | b.support, _digest(a.label, "+", b.label))


class SymbolGerm:
    __slots__ = ("pieces", "tail")

    def __init__(self, pieces: Mapping | Iterable = (), tail: Tail | None = None):
        self.pieces: dict = {}
        items = pieces.items() if isinstance(pieces, Mapping) else pieces
        for order, c in items:
            self._add(order, ZetaCoefficient.coerce(c))
        self.tail = tail

    def _add(self, order: AffineForm, c: ZetaCoefficient) -> None:
        if not is_admissible(order):
            if not c:
                return
            raise ValueError(f"inadmissible order {order}")
        old = self.pieces.get(order)
        c = c if old is None else old + c
        if c:
            self.pieces[order] = c
        else:
            self.pieces.pop(order, None)

    # -- constructors ------------------------------------------------------
    @classmethod
    def monomial(cls, order: AffineForm, coeff=1) -> "SymbolGerm":
        return cls([(order, coeff)])

    @classmethod
    def constant(cls, c) -> "SymbolGerm":
        return cls([(AffineForm.const(0), c)])

    @classmethod
    def polynomial(cls, coeffs: Iterable) -> "SymbolGerm":
        return cls([(AffineForm.const(k), c) for k, c in enumerate(coeffs)])

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: "SymbolGerm") -> "SymbolGerm":
        out = SymbolGerm(self.pieces, merge_tails(self.tail, other.tail))
        for o, c in other.pieces.items():
            out._add(o, c)
        return out

    def __neg__(self) -> "SymbolGerm":
        return SymbolGerm({o: -c for o, c in self.pieces.items()}, self.tail)

    def __sub__(self, other: "SymbolGerm") -> "SymbolGerm":
        return self + (-other)

    def scale(self, s) -> "SymbolGerm":
        return SymbolGerm({o: c * s for o, c in self.pieces.items()},
                          self.tail.times(AffineForm.const(0), ZetaCoefficient.coerce(s))
                          if self.tail else None)

    def mul(self, other: "SymbolGerm") -> "SymbolGerm":
        out = SymbolGerm()
        for o1, c1 in self.pieces.items():
            for o2, c2 in other.pieces.items():
                order = o1 + o2
                if not is_admissible(order):
                    raise ValueError(f"product has inadmissible order {order}")
                out._add(order, c1 * c2)
        tail = None
        for a, b in ((self, other), (other, self)):
            if a.tail is not None:
                for o, c in b.pieces.items():
                    tail = merge_tails(tail, a.tail.times(o, c))
        if self.tail and other.tail:
            t1, t2 = self.tail, other.tail
            tail = merge_tails(tail, Tail(t1.order_bound + t2.order_bound, t1.degree + t2.degree,
                                          t1.holomorphic and t2.holomorphic,
                                          t1.support | t2.support,
                                          _digest(t1.label, "*", t2.label)))
        out.tail = tail
        return out

    __mul__ = mul

    def truncate_homogeneity(self, h) -> "SymbolGerm":
        if h is None:
            return self
        return SymbolGerm({o: c.truncate_homogeneity(h) for o, c in self.pieces.items()},
                          self.tail)

    # -- queries -----------------------------------------------------------
    def support(self) -> Subspace:
        forms = []
        for o, c in self.pieces.items():
            forms.append(o.linear)
            forms.extend(c.support_forms())
        if self.tail is not None:
            forms.extend(LinearForm.var(i) for i in sorted(self.tail.support))
        return Subspace(forms)

    def orders(self) -> list:
        return sorted(self.pieces, key=lambda o: (-o.constant, o.sort_key()))

    def evaluate(self, n, z=None) -> object:
        """Exact value at the integer n >= 1 (orders must be integers at z)."""
        if self.tail is not None:
            raise InsufficientDepth("cannot evaluate a symbol with a discarded tail")
        z = z if z is not None else ()
        point = {i + 1: Fraction(x) for i, x in enumerate(z)} if not isinstance(z, Mapping) \
            else {int(k): Fraction(v) for k, v in z.items()}
        total = Fraction(0)
        for o, c in self.pieces.items():
            e = o.linear({i: point.get(i, 0) for i in o.linear.support()}) + o.constant
            if e.denominator != 1:
                raise ValueError("exact evaluation needs integer orders")
            total = total + c.evaluate_point(point) * Fraction(n) ** int(e)
        return total

    def __str__(self) -> str:
        parts = [f"({c})*x^({o})" for o, c in
                 ((o, self.pieces[o]) for o in self.orders())]
        if self.tail:
            parts.append(f"O(x^({self.tail.order_bound}))")
        return " + ".join(parts) or "0"

    __repr__ = __str__

    def to_json(self) -> dict:
        return {"pieces": [[o.to_json(), self.pieces[o].to_json()] for o in self.orders()],
                "tail": self.tail.to_json() if self.tail else None}

    @staticmethod
    def from_json(d) -> "SymbolGerm":
        tail = Tail.from_json(d["tail"]) if d.get("tail") else None
        return SymbolGerm([(AffineForm.from_json(o), ZetaCoefficient.from_json(c))
                           for o, c in d["pieces"]], tail)


def symbol_mul(sigma: SymbolGerm, tau: SymbolGerm, Q: InnerProduct = IDENTITY) -> SymbolGerm:
    """Locality product: defined on symbols with Q-orthogonal supports."""
    if not spans_orthogonal(Q, sigma.support(), tau.support()):
        raise LocalityError("symbols are not independent", (sigma, tau))
    return sigma.mul(tau)


def fp_infinity(sigma: SymbolGerm) -> ZetaCoefficient:
    """Finite part at infinity: the coefficient of x^0."""
    t = sigma.tail
    if t is not None and t.order_bound.linear.is_zero() and t.order_bound.constant >= 0:
        raise InsufficientDepth("the discarded tail may contain a constant term")
    return sigma.pieces.get(AffineForm.const(0), ZetaCoefficient())


def fp_of_product(sigmas: Sequence[SymbolGerm], depth: int | None = None) -> ZetaCoefficient:
    """fp_infinity of the product of the sigmas (each product truncated to
    homogeneity `depth`), without expanding the whole product.

    Only choices of one piece per factor whose orders add up to 0 reach the
    constant term, so partial products that can no longer be cancelled by
    the remaining factors are dropped.
    """
    sigmas = list(sigmas)
    zero = AffineForm.const(0)
    _check_product_tails(sigmas)
    reach = [{zero}]
    for sig in reversed(sigmas[1:]):
        reach.append({o + r for o in sig.pieces for r in reach[-1]})
    reach.reverse()
    partial = {zero: ZetaCoefficient.coerce(1)}
    for sig, later in zip(sigmas, reach):
        nxt: dict = {}
        for o1, c1 in partial.items():
            for o2, c2 in sig.pieces.items():
                order = o1 + o2
                if -order not in later:
                    continue
                c = (c1 * c2).truncate_homogeneity(depth) if depth is not None else c1 * c2
                old = nxt.get(order)
                nxt[order] = c if old is None else old + c
        partial = nxt
    return partial.get(zero, ZetaCoefficient())


def _check_product_tails(sigmas: Sequence[SymbolGerm]) -> None:
    # a product term involving some discarded tail has order <= sum of the
    # chosen bounds; it can hold a constant only if the linear parts cancel
    states = {(LinearForm(), False): Fraction(0)}
    for sig in sigmas:
        opts = [(o, False) for o in sig.pieces]
        if sig.tail is not None:
            opts.append((sig.tail.order_bound, True))
        nxt: dict = {}
        for (lin, tailed), const in states.items():
            for o, t in opts:
                key = (lin + o.linear, tailed or t)
                value = const + o.constant
                if key not in nxt or value > nxt[key]:
                    nxt[key] = value
        states = nxt
    for (lin, tailed), const in states.items():
        if tailed and lin.is_zero() and const >= 0:
            raise InsufficientDepth("the discarded tail may contain a constant term")


def _falling(alpha: AffineForm, k: int, max_degree=None) -> Poly:
    """alpha (alpha - 1) ... (alpha - k + 1) as a polynomial in z."""
    return _falling_table(alpha, k, max_degree)[k]


@lru_cache(maxsize=4096)
def _falling_table(alpha: AffineForm, k: int, max_degree) -> tuple:
    out = [Poly.const(1)]
    for j in range(k):
        out.append(out[-1].mul(Poly.affine(alpha - j), max_degree))
    return tuple(out)


def _binomial(beta: AffineForm, i: int) -> Poly:
    return _falling(beta, i).scale(Fraction(1, factorial(i)))


def shift_expansion(sigma: SymbolGerm, a, depth: int) -> SymbolGerm:
    """Re-expansion of sigma(x + a) in powers of x."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    a = Fraction(a)
    out = SymbolGerm(tail=sigma.tail)
    for beta, c in sigma.pieces.items():
        poly_order = beta.linear.is_zero()
        top = min(depth, int(beta.constant)) if poly_order else depth
        for i in range(top + 1):
            coeff = c * Germ.polynomial(_binomial(beta, i).scale(a ** i))
            out._add(beta - i, coeff)
        if not poly_order and a != 0:
            t = Tail(beta - (depth + 1), 0, True, frozenset(), _digest("shift", beta, a, depth))
            out.tail = merge_tails(out.tail, t.times(AffineForm.const(0), c))
    return out


def differentiate(sigma: SymbolGerm) -> SymbolGerm:
    out = SymbolGerm()
    for alpha, c in sigma.pieces.items():
        if alpha.linear.is_zero() and alpha.constant == 0:
            continue
        out._add(alpha - 1, c * Germ.polynomial(Poly.affine(alpha)))
    if sigma.tail is not None:
        t = sigma.tail
        out.tail = Tail(t.order_bound - 1, t.degree, t.holomorphic, t.support,
                        _digest("d", t.label))
    return out


def _sum_tail(tail: Tail, lam: int) -> tuple[Germ, Tail]:
    """Regularised sum (or integral) of a discarded remainder."""
    if tail.order_bound.constant >= -1:
        raise InsufficientDepth(
            f"remainder of order {tail.order_bound} is not summable; increase K")
    label = _digest("sum", lam, tail.label)
    if tail.holomorphic:
        u = unknown_function(label, max(tail.degree, 0), tail.support)
        const = Germ.const(CoeffPoly.atom(u))
    else:
        const = Germ.unknown(tail.degree - 1)
    return const, Tail(tail.order_bound + 1, tail.degree, tail.holomorphic, tail.support, label)


def euler_maclaurin(lam: int, sigma: SymbolGerm, K: int = 8, depth: int | None = None) -> SymbolGerm:
    """The summation operator S_lam (lam = +1 weak, -1 strict, 0 integration).

    K is the number of Euler-Maclaurin terms kept; depth, if given, is the
    homogeneity up to which coefficients are retained.
    """
    if lam not in (-1, 0, 1):
        raise ValueError("lambda must be -1, 0 or 1")
    if K < 2:
        raise ValueError("K must be >= 2")
    out = SymbolGerm()
    zero = AffineForm.const(0)
    for alpha, c in sigma.pieces.items():
        a = alpha.constant
        if alpha.linear.is_zero():
            k = int(a)
            if lam == 0:
                out._add(alpha + 1, c * Fraction(1, k + 1))
                continue
            for j, f in enumerate(faulhaber_polynomial(k, strict=False)):
                if f:
                    out._add(AffineForm.const(j), c * f)
            continue
        up = alpha + 1
        out._add(up, c * Germ.reciprocal(up))
        if lam == 0:
            if a.denominator != 1:
                raise ValueError("chi moments are only tabulated at integer orders")
            moment = Germ.polynomial(Poly.const(CoeffPoly.atom(chi_moment(a))), 0)
            out._add(zero, c * (moment - Germ.reciprocal(up)))
            continue
        out._add(zero, c * ZetaCoefficient.zeta(-alpha))
        out._add(alpha, c * Fraction(1, 2))
        low = c.low_homogeneity()
        md = None if depth is None or low == INF else int(depth - low)
        falling = _falling_table(alpha, K, md)
        for k in range(2, K + 1):
            b = bernoulli(k)
            if not b:
                continue
            coeff = Germ.polynomial(falling[k - 1].scale(b / factorial(k)))
            out._add(alpha - (k - 1), c * coeff)
        if a - K > -2:
            raise InsufficientDepth(f"K = {K} too small for order {alpha}")
        vanishes = a.denominator == 1 and 0 <= a <= K - 1
        base = Tail(alpha - K, 1 if vanishes else 0, True, alpha.linear.support(),
                    _digest("em", K, alpha))
        out.tail = merge_tails(out.tail, base.times(zero, c))
    if sigma.tail is not None:
        const, tail = _sum_tail(sigma.tail, lam)
        out._add(zero, ZetaCoefficient.coerce(const))
        out.tail = merge_tails(out.tail, tail)
    if lam == -1:
        out = out - sigma
    return out.truncate_homogeneity(depth)


def integrate(sigma: SymbolGerm, depth: int | None = None) -> SymbolGerm:
    return euler_maclaurin(0, sigma, 2, depth)


def cutoff_sum(lam: int, sigma: SymbolGerm, K: int = 8) -> ZetaCoefficient:
    return fp_infinity(euler_maclaurin(lam, sigma, K))


def cutoff_integral(sigma: SymbolGerm) -> ZetaCoefficient:
    return fp_infinity(integrate(sigma))


def partial_sum_oracle(sigma: SymbolGerm, N: int, z=None, mode: str = "weak") -> object:
    """Direct summation of sigma(n) for 1 <= n <= N (weak) or n < N (strict)."""
    if mode not in ("weak", "strict"):
        raise ValueError("mode must be 'weak' or 'strict'")
    top = N if mode == "weak" else N - 1
    total = Fraction(0)
    for n in range(1, top + 1):
        total = total + sigma.evaluate(n, z)
    return total


class SymbolAlgebra(LocalityAlgebra):
    """Symbols under Q-orthogonality of supports, with S_lam as operator."""

    def __init__(self, lam: int, Q: InnerProduct = IDENTITY, K: int = 8,
                 depth: int | None = None, check: bool = True):
        self.lam = lam
        self.Q = Q
        self.K = K
        self.depth = depth
        self.check = check
        self.unit = SymbolGerm.constant(1)
        self.weight = -lam

    def independent(self, a: SymbolGerm, b: SymbolGerm) -> bool:
        if not self.check:
            return True
        return spans_orthogonal(self.Q, a.support(), b.support())

    def product(self, a: SymbolGerm, b: SymbolGerm) -> SymbolGerm:
        return a.mul(b).truncate_homogeneity(self.depth)

    def add(self, a: SymbolGerm, b: SymbolGerm) -> SymbolGerm:
        return a + b

    def scale(self, a: SymbolGerm, c) -> SymbolGerm:
        return a.scale(c)

    def operator(self, sigma: SymbolGerm) -> SymbolGerm:
        return euler_maclaurin(self.lam, sigma, self.K, self.depth)

    __call__ = operator
