"""Linear and affine forms on the coordinates z_1, z_2, ..., a rational inner
product Q on them, and exact linear algebra over Q (the rationals)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class LinearForm:
    """Sum c_i z_i with rational c_i; immutable and hashable."""

    __slots__ = ("items", "_hash", "_support")

    def __init__(self, coefficients: Mapping[int, object] | Iterable = ()):
        if isinstance(coefficients, Mapping):
            pairs = coefficients.items()
        else:
            pairs = coefficients
        acc: dict[int, Fraction] = {}
        for i, c in pairs:
            i = int(i)
            if i < 1:
                raise ValueError("variable indices start at 1")
            acc[i] = acc.get(i, Fraction(0)) + Fraction(c)
        self.items: tuple = tuple(sorted((i, c) for i, c in acc.items() if c))
        self._hash = hash(self.items)

    @classmethod
    def var(cls, i: int, c=1) -> "LinearForm":
        if i < 1:
            raise ValueError("variable indices start at 1")
        return cls._from_dict({int(i): Fraction(c)})

    @classmethod
    def sum_of(cls, indices: Iterable[int]) -> "LinearForm":
        return cls([(i, 1) for i in indices])

    @property
    def coefficients(self) -> dict[int, Fraction]:
        return dict(self.items)

    def coefficient(self, i: int) -> Fraction:
        for j, c in self.items:
            if j == i:
                return c
        return Fraction(0)

    def support(self) -> frozenset:
        try:
            return self._support
        except AttributeError:
            self._support = frozenset(i for i, _ in self.items)
            return self._support

    def is_zero(self) -> bool:
        return not self.items

    def __bool__(self) -> bool:
        return bool(self.items)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearForm) and self.items == other.items

    def __hash__(self) -> int:
        return self._hash

    @staticmethod
    def _from_dict(acc: dict) -> "LinearForm":
        # trusted constructor: keys are valid indices, values Fractions
        L = LinearForm.__new__(LinearForm)
        L.items = tuple(sorted((i, c) for i, c in acc.items() if c))
        L._hash = hash(L.items)
        return L

    def __add__(self, other: "LinearForm") -> "LinearForm":
        acc = dict(self.items)
        for i, c in other.items:
            acc[i] = acc[i] + c if i in acc else c
        return LinearForm._from_dict(acc)

    def __neg__(self) -> "LinearForm":
        return LinearForm._from_dict({i: -c for i, c in self.items})

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        acc = dict(self.items)
        for i, c in other.items:
            acc[i] = acc[i] - c if i in acc else -c
        return LinearForm._from_dict(acc)

    def __mul__(self, s) -> "LinearForm":
        s = Fraction(s)
        return LinearForm._from_dict({i: c * s for i, c in self.items})

    __rmul__ = __mul__

    def __call__(self, point: Mapping[int, object] | Sequence):
        if isinstance(point, Mapping):
            return sum((c * point.get(i, 0) for i, c in self.items), Fraction(0))
        return sum((c * point[i - 1] for i, c in self.items), Fraction(0))

    def leading(self) -> Fraction:
        return self.items[0][1]

    def normalized(self) -> tuple[Fraction, "LinearForm"]:
        """(c, L') with L = c * L' and L' having leading coefficient 1."""
        c = self.leading()
        return c, self * (1 / c)

    def primitive(self) -> "LinearForm":
        """Integer multiple with coprime integer coefficients, leading > 0."""
        den = 1
        for _, c in self.items:
            den = den * c.denominator // gcd(den, c.denominator)
        nums = [int(c * den) for _, c in self.items]
        g = 0
        for n in nums:
            g = gcd(g, n)
        if nums and nums[0] < 0:
            g = -g
        return LinearForm([(i, Fraction(n, g)) for (i, _), n in zip(self.items, nums)])

    def sort_key(self) -> tuple:
        return tuple((i, c.numerator, c.denominator) for i, c in self.items)

    def __str__(self) -> str:
        if not self.items:
            return "0"
        parts = []
        for i, c in self.items:
            if c == 1:
                parts.append(f"z{i}")
            elif c == -1:
                parts.append(f"-z{i}")
            else:
                parts.append(f"{c}*z{i}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"LinearForm({self})"

    def to_json(self) -> list:
        return [[i, str(c)] for i, c in self.items]

    @staticmethod
    def from_json(data) -> "LinearForm":
        return LinearForm([(int(i), Fraction(c)) for i, c in data])


ZERO_FORM = LinearForm()


@dataclass(frozen=True)
class AffineForm:
    linear: LinearForm = ZERO_FORM
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "constant", Fraction(self.constant))

    @classmethod
    def const(cls, c) -> "AffineForm":
        return cls(ZERO_FORM, Fraction(c))

    def is_unit_at_zero(self) -> bool:
        return self.constant != 0

    def is_homogeneous(self) -> bool:
        return self.constant == 0

    def is_constant(self) -> bool:
        return self.linear.is_zero()

    def __add__(self, other) -> "AffineForm":
        if isinstance(other, AffineForm):
            return AffineForm(self.linear + other.linear, self.constant + other.constant)
        if isinstance(other, LinearForm):
            return AffineForm(self.linear + other, self.constant)
        return AffineForm(self.linear, self.constant + Fraction(other))

    __radd__ = __add__

    def __neg__(self) -> "AffineForm":
        return AffineForm(-self.linear, -self.constant)

    def __sub__(self, other) -> "AffineForm":
        return self + (-other)

    def __rsub__(self, other) -> "AffineForm":
        return (-self) + other

    def __mul__(self, s) -> "AffineForm":
        return AffineForm(self.linear * s, self.constant * Fraction(s))

    __rmul__ = __mul__

    def __call__(self, point):
        return self.linear(point) + self.constant

    def sort_key(self) -> tuple:
        return (self.linear.sort_key(), self.constant.numerator, self.constant.denominator)

    def __str__(self) -> str:
        if self.linear.is_zero():
            return str(self.constant)
        if self.constant == 0:
            return str(self.linear)
        sign = "+" if self.constant > 0 else "-"
        return f"{self.linear} {sign} {abs(self.constant)}"

    def __repr__(self) -> str:
        return f"AffineForm({self})"

    def to_json(self) -> list:
        return [self.linear.to_json(), str(self.constant)]

    @staticmethod
    def from_json(data) -> "AffineForm":
        return AffineForm(LinearForm.from_json(data[0]), Fraction(data[1]))


# ---------------------------------------------------------------------------
# exact linear algebra


def row_reduce(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def _vectors(forms: Sequence[LinearForm], variables: Sequence[int]) -> list[list[Fraction]]:
    return [[f.coefficient(i) for i in variables] for f in forms]


def variables_of(forms: Iterable[LinearForm]) -> list[int]:
    out: set[int] = set()
    for f in forms:
        out |= f.support()
    return sorted(out)


def rank(forms: Sequence[LinearForm]) -> int:
    forms = [f for f in forms if f]
    if not forms:
        return 0
    reduced, _ = row_reduce(_vectors(forms, variables_of(forms)))
    return len(reduced)


def linear_relation(forms: Sequence[LinearForm]) -> list[Fraction] | None:
    """Coefficients c (not all zero) with sum c_k forms[k] = 0, or None."""
    rel = _relation_cached(tuple(forms))
    return None if rel is None else list(rel)


@lru_cache(maxsize=4096)
def _relation_cached(forms: tuple) -> tuple | None:
    n = len(forms)
    if n == 0:
        return None
    variables = variables_of(forms)
    # columns are the forms; find a kernel vector of the coefficient matrix
    matrix = [[forms[k].coefficient(i) for k in range(n)] for i in variables]
    if not matrix:
        return (Fraction(1),) + (Fraction(0),) * (n - 1)
    reduced, pivots = row_reduce(matrix)
    free = [k for k in range(n) if k not in pivots]
    if not free:
        return None
    f = free[0]
    coeffs = [Fraction(0)] * n
    coeffs[f] = Fraction(1)
    for row, p in zip(reduced, pivots):
        coeffs[p] = -row[f]
    return tuple(coeffs)


def solve_in_basis(basis: Sequence[LinearForm], targets: Sequence[LinearForm]) -> list[list[Fraction]]:
    """Coordinates of each target in the (linearly independent) basis."""
    return [list(x) for x in _solve_cached(tuple(basis), tuple(targets))]


@lru_cache(maxsize=4096)
def _solve_cached(basis: tuple, targets: tuple) -> tuple:
    variables = variables_of(list(basis) + list(targets))
    n = len(basis)
    out = []
    # augmented system: sum_k x_k basis_k = target
    for t in targets:
        rows = [[b.coefficient(i) for b in basis] + [t.coefficient(i)] for i in variables]
        reduced, pivots = row_reduce(rows)
        if n in pivots:
            raise ValueError(f"{t} is not in the span of the basis")
        x = [Fraction(0)] * n
        for row, p in zip(reduced, pivots):
            x[p] = row[n]
        out.append(tuple(x))
    return tuple(out)


# ---------------------------------------------------------------------------
# inner product and subspaces


def _determinant(matrix: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in matrix]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for i in range(col + 1, n):
            if m[i][col]:
                f = m[i][col] / m[col][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return det


@dataclass(frozen=True)
class InnerProduct:
    """Identity plus finitely many symmetric rational overrides."""

    entries: tuple = ()
    _lookup: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        lookup = {}
        for i, j, v in self.entries:
            v = Fraction(v)
            lookup[(i, j)] = v
            lookup[(j, i)] = v
        self._lookup.update(lookup)

    @classmethod
    def identity(cls) -> "InnerProduct":
        return cls()

    @classmethod
    def from_entries(cls, entries: Iterable) -> "InnerProduct":
        seen: dict = {}
        for i, j, v in entries:
            i, j, v = int(i), int(j), Fraction(v)
            if i < 1 or j < 1:
                raise ValueError("variable indices start at 1")
            key = (min(i, j), max(i, j))
            if key in seen and seen[key] != v:
                raise ValueError(f"inconsistent entries for {key}: not symmetric")
            seen[key] = v
        q = cls(tuple((i, j, v) for (i, j), v in sorted(seen.items())))
        q.validate()
        return q

    @classmethod
    def load(cls, path: str | Path) -> "InnerProduct":
        data = json.loads(Path(path).read_text())
        return cls.from_entries(data.get("entries", []))

    def to_json(self) -> dict:
        return {"entries": [[i, j, str(v)] for i, j, v in self.entries]}

    @property
    def is_identity(self) -> bool:
        return not self.entries

    def touched(self) -> list[int]:
        return sorted({i for i, _, _ in self.entries} | {j for _, j, _ in self.entries})

    def value(self, i: int, j: int) -> Fraction:
        v = self._lookup.get((i, j))
        if v is not None:
            return v
        return Fraction(1) if i == j else Fraction(0)

    def validate(self, variables: Iterable[int] | None = None) -> None:
        """Check positive definiteness by leading principal minors."""
        vs = sorted(set(variables or []) | set(self.touched()))
        for k in range(1, len(vs) + 1):
            sub = [[self.value(vs[a], vs[b]) for b in range(k)] for a in range(k)]
            if _determinant(sub) <= 0:
                raise ValueError("inner product is not positive definite")

    def coupling(self, i: int) -> list[int]:
        return [b for (a, b) in self._lookup if a == i and b != i]


IDENTITY = InnerProduct()


def inner(Q: InnerProduct, a: LinearForm, b: LinearForm) -> Fraction:
    if Q.is_identity:
        if len(a.items) > len(b.items):
            a, b = b, a
        bc = dict(b.items)
        return sum((c * bc.get(i, 0) for i, c in a.items), Fraction(0))
    total = Fraction(0)
    for i, ci in a.items:
        for j, cj in b.items:
            q = Q.value(i, j)
            if q:
                total += ci * cj * q
    return total


@dataclass(frozen=True)
class Subspace:
    spanning: tuple = ()

    def __init__(self, spanning: Iterable[LinearForm] = ()):
        object.__setattr__(self, "spanning", tuple(f for f in spanning if f))

    def rank(self) -> int:
        return rank(self.spanning)

    def support(self) -> frozenset:
        out: frozenset = frozenset()
        for f in self.spanning:
            out |= f.support()
        return out

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.spanning + other.spanning)

    def contains(self, form: LinearForm) -> bool:
        return rank(list(self.spanning) + [form]) == self.rank()

    def contains_subspace(self, other: "Subspace") -> bool:
        return rank(list(self.spanning) + list(other.spanning)) == self.rank()

    def basis(self) -> list[LinearForm]:
        out: list[LinearForm] = []
        for f in self.spanning:
            if rank(out + [f]) > len(out):
                out.append(f)
        return out

    def __str__(self) -> str:
        return "span{" + ", ".join(str(f) for f in self.spanning) + "}"


def spans_orthogonal(Q: InnerProduct, s1: Subspace, s2: Subspace) -> bool:
    if Q.is_identity and not (s1.support() & s2.support()):
        return True
    return all(inner(Q, a, b) == 0 for a in s1.spanning for b in s2.spanning)


def orthogonal_complement(Q: InnerProduct, inside: Subspace,
                          ambient: Iterable[int]) -> Subspace:
    """Basis of the Q-orthogonal complement of span(inside) within the span
    of the ambient coordinates (Gram-Schmidt over Q, no normalisation)."""
    return _complement(Q, inside.spanning, tuple(sorted(set(ambient))))


@lru_cache(maxsize=4096)
def _complement(Q: InnerProduct, spanning: tuple, ambient: tuple) -> Subspace:
    inside = Subspace(spanning)
    if not inside.support() <= set(ambient):
        raise ValueError("ambient variables do not contain the support of the subspace")
    ortho: list[tuple[LinearForm, Fraction]] = []

    def reduce(v: LinearForm) -> LinearForm:
        for b, bb in ortho:
            c = inner(Q, v, b)
            if c:
                v = v - b * (c / bb)
        return v

    for f in inside.spanning:
        v = reduce(f)
        if v:
            ortho.append((v, inner(Q, v, v)))
    complement = []
    for i in ambient:
        v = reduce(LinearForm.var(i))
        if v:
            v = v.primitive()
            ortho.append((v, inner(Q, v, v)))
            complement.append(v)
    return Subspace(complement)
