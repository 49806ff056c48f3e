"""Exact scalars: Bernoulli numbers, formal transcendental constants and the
polynomial ring they generate, plus float to rational reconstruction."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Union

import mpmath

Rational = Fraction
Scalar = Union[int, Fraction]

_bernoulli_lock = threading.Lock()
_bernoulli_table: list[Fraction] = [Fraction(1)]


def bernoulli(k: int) -> Fraction:
    """Return B_k with the convention B_1 = -1/2."""
    if k < 0:
        raise ValueError("bernoulli index must be non-negative")
    if k < len(_bernoulli_table):
        return _bernoulli_table[k]
    with _bernoulli_lock:
        table = _bernoulli_table
        for m in range(len(table), k + 1):
            if m > 1 and m % 2:
                table.append(Fraction(0))
                continue
            acc = sum(comb(m + 1, j) * table[j] for j in range(m))
            table.append(-acc / (m + 1))
        return table[k]


def zeta_at_nonpositive(n: int) -> Fraction:
    """zeta(-n) = (-1)^n B_{n+1}/(n+1) for n >= 0 (B_1 = -1/2)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return (-1) ** n * bernoulli(n + 1) / (n + 1)


@lru_cache(maxsize=None)
def faulhaber_polynomial(k: int, strict: bool = False) -> tuple:
    """Coefficients (in N) of sum_{m=1}^{N} m^k, or of sum_{m=1}^{N-1} m^k
    when strict."""
    if k < 0:
        raise ValueError("k must be >= 0")
    coeffs = [Fraction(0)] * (k + 2)
    # sum_{m=0}^{N-1} m^k = 1/(k+1) sum_j C(k+1, j) B_j N^{k+1-j}
    for j in range(k + 1):
        coeffs[k + 1 - j] += comb(k + 1, j) * bernoulli(j) / (k + 1)
    if k == 0:
        coeffs[0] -= 1
    if not strict:
        coeffs[k] += 1
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


def rational_reconstruct(x: float, denominator_bound: int,
                         tolerance: float) -> Fraction | None:
    """Best rational approximation of x with denominator <= bound, if it is
    within tolerance; None otherwise."""
    if denominator_bound < 1 or tolerance <= 0:
        raise ValueError("need denominator_bound >= 1 and tolerance > 0")
    candidate = Fraction(x).limit_denominator(denominator_bound)
    if abs(float(candidate) - x) <= tolerance:
        return candidate
    return None


# ---------------------------------------------------------------------------
# formal constants

_TAGS = ("zeta_at", "zeta_deriv", "euler_gamma", "stieltjes", "chi_moment",
         "opaque")


@dataclass(frozen=True, order=False)
class FormalConstant:
    tag: str
    args: tuple = ()

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError(f"unknown constant tag {self.tag!r}")

    @property
    def sort_key(self) -> tuple:
        return (_TAGS.index(self.tag), tuple(str(a) for a in self.args))

    def __str__(self) -> str:
        if self.tag == "zeta_at":
            return f"zeta({self.args[0]})"
        if self.tag == "zeta_deriv":
            order, point = self.args
            return f"zeta^({order})({point})"
        if self.tag == "euler_gamma":
            return "gamma"
        if self.tag == "stieltjes":
            return f"gamma_{self.args[0]}"
        if self.tag == "chi_moment":
            return f"chi_moment({self.args[0]})"
        return f"opaque({self.args[0]})"

    def to_json(self) -> list:
        if self.is_unknown_function():
            ident, degree, support = self.args
            return [self.tag, ident, str(degree), ",".join(map(str, support))]
        return [self.tag, *[str(a) for a in self.args]]

    def is_unknown_function(self) -> bool:
        return self.tag == "opaque" and len(self.args) == 3

    @property
    def vanishing_order(self) -> int:
        """Known order of vanishing at z = 0 (0 for genuine constants)."""
        return self.args[1] if self.is_unknown_function() else 0

    @staticmethod
    def from_json(data: list) -> "FormalConstant":
        tag, *raw = data
        if tag in ("zeta_at", "stieltjes"):
            return FormalConstant(tag, (int(raw[0]),))
        if tag == "zeta_deriv":
            return FormalConstant(tag, (int(raw[0]), int(raw[1])))
        if tag == "chi_moment":
            return FormalConstant(tag, (Fraction(raw[0]),))
        if tag == "euler_gamma":
            return EULER_GAMMA
        if len(raw) == 3:
            support = tuple(int(v) for v in raw[2].split(",") if v)
            return FormalConstant(tag, (raw[0], int(raw[1]), support))
        return FormalConstant(tag, (raw[0],))


def zeta_at(m: int) -> FormalConstant:
    if m < 2:
        raise ValueError("zeta_at needs m >= 2")
    return FormalConstant("zeta_at", (m,))


def zeta_deriv(order: int, point: int) -> FormalConstant:
    # points >= 2 are admitted as well: Taylor data of zeta at convergent
    # integer arguments shows up in the same expansions
    if order < 1 or point == 1:
        raise ValueError("zeta_deriv needs order >= 1 and point != 1")
    return FormalConstant("zeta_deriv", (order, point))


EULER_GAMMA = FormalConstant("euler_gamma")


def stieltjes(n: int) -> FormalConstant:
    if n < 1:
        raise ValueError("stieltjes needs n >= 1 (use EULER_GAMMA for n = 0)")
    return FormalConstant("stieltjes", (n,))


def chi_moment(exponent: Scalar) -> FormalConstant:
    return FormalConstant("chi_moment", (Fraction(exponent),))


def opaque(ident: str) -> FormalConstant:
    return FormalConstant("opaque", (ident,))


def unknown_function(ident: str, degree: int, support) -> FormalConstant:
    """An unevaluated holomorphic germ depending only on the variables in
    support and vanishing to order >= degree at zero."""
    return FormalConstant("opaque", (ident, int(degree), tuple(sorted(support))))


def excision(y):
    """The fixed excision function: 0 near 0, 1 on [1, oo), smooth."""
    y = mpmath.mpf(y)
    if y <= 0:
        return mpmath.mpf(0)
    if y >= 1:
        return mpmath.mpf(1)
    a = mpmath.exp(-1 / y)
    b = mpmath.exp(-1 / (1 - y))
    return a / (a + b)


def constant_numeric_value(c: FormalConstant, precision_bits: int = 256):
    """Numeric value of a formal constant as an mpmath number."""
    if precision_bits < 53:
        raise ValueError("precision_bits must be >= 53")
    with mpmath.workprec(precision_bits):
        if c.tag == "zeta_at":
            value = mpmath.zeta(c.args[0])
        elif c.tag == "zeta_deriv":
            order, point = c.args
            value = mpmath.zeta(point, 1, order)
        elif c.tag == "euler_gamma":
            value = +mpmath.euler
        elif c.tag == "stieltjes":
            value = mpmath.stieltjes(c.args[0])
        elif c.tag == "chi_moment":
            e = c.args[0]
            ef = mpmath.mpf(e.numerator) / e.denominator
            value = mpmath.quad(lambda y: excision(y) * y ** ef, [0, 0.5, 1])
        else:
            raise ValueError(f"no numeric value for {c}")
    return +value


# ---------------------------------------------------------------------------
# sparse polynomials over atoms (formal constants, and z-indices for germs)

Atom = Union[int, FormalConstant]
Monomial = tuple  # tuple of (atom, exponent), sorted by atom key


def atom_key(atom: Atom) -> tuple:
    if isinstance(atom, int):
        return (0, atom)
    return (1,) + atom.sort_key


def monomial_key(mono: Monomial) -> tuple:
    return tuple((atom_key(a), e) for a, e in mono)


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    powers = dict(m1)
    for a, e in m2:
        powers[a] = powers.get(a, 0) + e
    return tuple(sorted(powers.items(), key=lambda item: atom_key(item[0])))


class CoeffPoly:
    """Sparse polynomial with rational coefficients.

    Atoms are formal constants; germ numerators additionally use integer
    atoms standing for the coordinates z_i.  No zero coefficient is stored.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                if c:
                    clean[mono] = Fraction(c)
        self.terms: dict[Monomial, Fraction] = clean
        self._hash = None

    @staticmethod
    def _raw(terms: dict) -> "CoeffPoly":
        p = CoeffPoly.__new__(CoeffPoly)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, value: Scalar) -> "CoeffPoly":
        return cls({(): value}) if value else cls()

    @classmethod
    def atom(cls, atom: Atom, exponent: int = 1) -> "CoeffPoly":
        return cls._raw({((atom, exponent),): Fraction(1)})

    @classmethod
    def coerce(cls, value) -> "CoeffPoly":
        if isinstance(value, CoeffPoly):
            return value
        if isinstance(value, FormalConstant):
            return cls.atom(value)
        return cls.const(value)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other) -> "CoeffPoly":
        other = CoeffPoly.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, 0) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return CoeffPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "CoeffPoly":
        return CoeffPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "CoeffPoly":
        return self + (-CoeffPoly.coerce(other))

    def __rsub__(self, other) -> "CoeffPoly":
        return CoeffPoly.coerce(other) - self

    def __mul__(self, other) -> "CoeffPoly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return CoeffPoly()
            return CoeffPoly._raw({m: c * other for m, c in self.terms.items()})
        other = CoeffPoly.coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return CoeffPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CoeffPoly":
        result = CoeffPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other: Scalar) -> "CoeffPoly":
        return self * (1 / Fraction(other))

    # -- queries -----------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoeffPoly):
            try:
                other = CoeffPoly.coerce(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_rational(self) -> bool:
        return all(not m for m in self.terms)

    def rational_part(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.rational_part()

    def atoms(self) -> set:
        return {a for m in self.terms for a, _ in m}

    def constants(self) -> set:
        return {a for a in self.atoms() if isinstance(a, FormalConstant)}

    def numeric(self, precision_bits: int = 128, values: Mapping | None = None):
        """Evaluate numerically; integer atoms need an entry in values."""
        values = dict(values or {})
        with mpmath.workprec(precision_bits):
            total = mpmath.mpf(0)
            for mono, c in self.terms.items():
                term = mpmath.mpf(c.numerator) / c.denominator
                for a, e in mono:
                    if a not in values:
                        values[a] = constant_numeric_value(a, precision_bits)
                    term *= values[a] ** e
                total += term
        return +total

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: monomial_key(kv[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            factors = []
            for a, e in mono:
                name = f"z{a}" if isinstance(a, int) else str(a)
                factors.append(name if e == 1 else f"{name}^{e}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__

    # -- serialisation -----------------------------------------------------
    def to_json(self) -> list:
        out = []
        for mono, c in self.sorted_terms():
            enc = [[a if isinstance(a, int) else a.to_json(), e] for a, e in mono]
            out.append([enc, str(c)])
        return out

    @staticmethod
    def from_json(data: Iterable) -> "CoeffPoly":
        terms = {}
        for enc, c in data:
            atoms = []
            for a, e in enc:
                atom = a if isinstance(a, int) else FormalConstant.from_json(a)
                atoms.append((atom, int(e)))
            mono = tuple(sorted(atoms, key=lambda item: atom_key(item[0])))
            terms[mono] = terms.get(mono, 0) + Fraction(c)
        return CoeffPoly(terms)
