"""Least-squares recovery of germs with linear poles from numeric samples."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import numpy as np

from .germs import Germ, Poly
from .linear import InnerProduct, LinearForm, Subspace, orthogonal_complement, rank, row_reduce
from .numeric import ConditioningError


@dataclass
class FitResult:
    germ: Germ
    coefficients: list          # [(description, complex coefficient)]
    residual: float
    condition: float
    extra: dict = field(default_factory=dict)


def _form_values(L: LinearForm, cols: Mapping[int, np.ndarray]) -> np.ndarray:
    out = 0
    for i, c in L.items:
        out = out + float(c) * cols[i]
    return out


def _monomials(nvars: int, degree: int) -> list[tuple]:
    """Exponent tuples of total degree exactly `degree`."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def _as_coords(points: Sequence, variables: Sequence[int]) -> dict:
    cols = {v: [] for v in variables}
    for p in points:
        if not isinstance(p, Mapping):
            p = {i + 1: x for i, x in enumerate(p)}
        for v in variables:
            cols[v].append(complex(p.get(v, 0)))
    return {v: np.array(c) for v, c in cols.items()}


def _pivots(forms: Sequence[LinearForm], variables: Sequence[int]) -> set:
    rows = [[f.coefficient(v) for v in variables] for f in forms]
    _, piv = row_reduce(rows)
    return {variables[j] for j in piv}


def _fraction(x: float) -> Fraction:
    return Fraction(float(x))


def _solve(A: np.ndarray, b: np.ndarray, max_condition: float) -> tuple:
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1
    As = A / scale
    sv = np.linalg.svd(As, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    if cond > max_condition:
        raise ConditioningError(f"ill-conditioned fit (condition number {cond:.3g})")
    x, *_ = np.linalg.lstsq(As, b, rcond=None)
    x = x / scale
    r = A @ x - b
    res = float(np.linalg.norm(r) / max(np.linalg.norm(b), 1e-300))
    return x, res, cond


def fit_germ(samples: Iterable, poles: Sequence[LinearForm], degree_bound: int,
             max_pole_order: int, floor: float = 1e-12, max_condition: float = 1e12) -> FitResult:
    """Fit sum c_{m,D} z^m / prod_{L in D} L over monomials of degree <= degree_bound
    and multisets D of the given poles of size <= max_pole_order.

    Forms in one D must be linearly independent, and a numerator may not
    contain a pivot variable of D (those terms are already spanned by
    lower ones).  samples are (point, value) pairs; a point maps labels to
    numbers or is a sequence z_1, z_2, ...
    """
    samples = list(samples)
    points = [p for p, _ in samples]
    values = np.array([complex(v) for _, v in samples])
    variables = set()
    for p in points:
        variables |= set(p.keys()) if isinstance(p, Mapping) else set(range(1, len(p) + 1))
    for L in poles:
        variables |= L.support()
    variables = sorted(variables)
    cols = _as_coords(points, variables)
    forms = list(dict.fromkeys(poles))
    basis = []  # (monomial exponents, pole multiset)
    for size in range(0, max_pole_order + 1):
        for D in combinations_with_replacement(range(len(forms)), size):
            distinct = sorted(set(D))
            fs = [forms[i] for i in distinct]
            if fs and rank(fs) < len(fs):
                continue
            piv = _pivots(fs, variables) if fs else set()
            for deg in range(degree_bound + 1):
                for e in _monomials(len(variables), deg):
                    if any(e[k] and variables[k] in piv for k in range(len(variables))):
                        continue
                    basis.append((e, D))
    if len(samples) < len(basis):
        raise ConditioningError(f"{len(samples)} samples for a model of dimension {len(basis)}")
    fvals = [_form_values(L, cols) for L in forms]
    A = np.empty((len(samples), len(basis)), dtype=complex)
    for j, (e, D) in enumerate(basis):
        col = np.ones(len(samples), dtype=complex)
        for k, ek in enumerate(e):
            if ek:
                col = col * cols[variables[k]] ** ek
        for i in D:
            col = col / fvals[i]
        A[:, j] = col
    x, res, cond = _solve(A, values, max_condition)
    germ = Germ()
    coeffs = []
    for (e, D), c in zip(basis, x):
        if abs(c) < floor:
            c = 0j
        coeffs.append((_describe(e, D, variables, forms), complex(c)))
        if c == 0:
            continue
        mono = tuple((variables[k], ek) for k, ek in enumerate(e) if ek)
        num = Poly({mono: _fraction(c.real)})
        mult: dict = {}
        for i in D:
            mult[forms[i]] = mult.get(forms[i], 0) + 1
        germ = germ + Germ.term(num, list(mult.items()))
    return FitResult(germ, coeffs, res, cond)


def _describe(e, D, variables, forms) -> str:
    num = "*".join(f"z{variables[k]}" + (f"^{ek}" if ek > 1 else "")
                   for k, ek in enumerate(e) if ek) or "1"
    if not D:
        return num
    return num + "/(" + ")(".join(str(forms[i]) for i in D) + ")"


# ---------------------------------------------------------------------------
# homogeneous-component fitting used by numeric renormalisation


@dataclass(frozen=True)
class SamplingConfig:
    radius: float = 0.08
    ring: int = 16
    oversample: float = 2.0
    margin: float = 0.15
    seed: int = 0


def sample_directions(variables: Sequence[int], forms: Sequence[LinearForm], count: int,
                      margin: float, seed: int) -> np.ndarray:
    """count unit vectors w (rows) with |L(w)| >= margin |L| for all forms."""
    rng = np.random.default_rng(seed)
    out = []
    norms = [np.sqrt(sum(float(c) ** 2 for _, c in L.items)) for L in forms]
    idx = {v: k for k, v in enumerate(variables)}
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 1000 * count + 1000:
            raise ConditioningError("could not sample directions away from the poles")
        w = rng.normal(size=len(variables))
        w /= np.linalg.norm(w)
        ok = all(abs(sum(float(c) * w[idx[i]] for i, c in L.items)) >= margin * n
                 for L, n in zip(forms, norms))
        if ok:
            out.append(w)
    return np.array(out)


def polar_basis(Q: InnerProduct, variables: Sequence[int], forms: Sequence[LinearForm],
                degree: int, max_order: int) -> list:
    """Basis (numerator Poly, poles) of homogeneous degree `degree` germs:
    holomorphic monomials, and h(H)/prod L^m with the L independent, |m| <=
    max_order and h a polynomial in the Q-orthogonal complement H."""
    out = []
    if degree >= 0:
        for e in _monomials(len(variables), degree):
            mono = tuple((variables[k], ek) for k, ek in enumerate(e) if ek)
            out.append((Poly({mono: Fraction(1)}), ()))
    for size in range(1, len(forms) + 1):
        for S in combinations(forms, size):
            if rank(list(S)) < size:
                continue
            H = orthogonal_complement(Q, Subspace(S), variables).basis()
            for total in range(size, max_order + 1):
                hdeg = degree + total
                if hdeg < 0 or (hdeg > 0 and not H):
                    continue
                for ms in _compositions(total, size):
                    for e in _monomials(len(H), hdeg):
                        num = Poly.const(1)
                        for h, k in zip(H, e):
                            if k:
                                num = num.mul(Poly.linear(h).power(k))
                        out.append((num, tuple(zip(S, ms))))
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _poly_values(p: Poly, cols: Mapping[int, np.ndarray], n: int) -> np.ndarray:
    total = np.zeros(n)
    for mono, c in p.terms.items():
        term = np.full(n, float(c))
        for i, e in mono:
            term = term * cols[i] ** e
        total = total + term
    return total


def fit_components(ring_values: np.ndarray, directions: np.ndarray, ts: np.ndarray,
                   variables: Sequence[int], bases: Mapping[int, list],
                   max_condition: float = 1e13) -> tuple[Germ, dict]:
    """ring_values[i, j] = g(ts[j] * directions[i]); fit each homogeneous
    component g_d (d in bases) on its basis and return the sum as a Germ."""
    cols = {v: directions[:, k] for k, v in enumerate(variables)}
    n = len(directions)
    germ = Germ()
    report = {}
    comps = {d: np.mean(ring_values * ts[None, :] ** (-d), axis=1) for d in bases}
    ref = max(max(float(np.linalg.norm(g)) for g in comps.values()), 1e-300)
    for d, basis in sorted(bases.items()):
        gd = comps[d]
        if not basis:
            report[d] = {"dimension": 0, "residual": float(np.linalg.norm(gd)) / ref}
            continue
        A = np.empty((n, len(basis)))
        for j, (num, poles) in enumerate(basis):
            col = _poly_values(num, cols, n)
            for L, m in poles:
                col = col / _form_values(L, cols) ** m
            A[:, j] = col
        x, res, cond = _solve(A, gd.real, max_condition)
        res *= max(float(np.linalg.norm(gd.real)), 1e-300) / ref
        report[d] = {"dimension": len(basis), "residual": res, "condition": cond,
                     "imaginary": float(np.linalg.norm(gd.imag)) / ref}
        for (num, poles), c in zip(basis, x):
            if c:
                germ = germ + Germ.term(num.scale(_fraction(c)), list(poles))
    return germ, report
