"""Regularised and renormalised branched zeta values."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .algebra import (Forest, LinComb, LocalityAlgebra, LocalityError, Tree, branched_lift, flatten,
                      is_proper_forest, lift_through_words, make_tree, rb_weight)
from .germs import (Germ, InsufficientDepth, PoleError, evaluate_zero, germ_equal,
                    project_plus)
from .linear import IDENTITY, AffineForm, InnerProduct, LinearForm
from .fitting import SamplingConfig, fit_components, polar_basis, sample_directions
from .numeric import NumericConfig, NumVertex, forest_values
from .numeric import numeric_word_value as _numeric_word_value
from .numerics import CoeffPoly, rational_reconstruct
from .symbols import SymbolAlgebra, SymbolGerm, fp_infinity, fp_of_product, zeta_expand


@dataclass(frozen=True, order=True)
class Decoration:
    """A vertex decoration (label, weight): the symbol x^(-weight + z_label)."""

    label: int
    weight: Fraction

    def __post_init__(self):
        if int(self.label) != self.label or self.label < 1:
            raise ValueError("labels are integers >= 1")
        object.__setattr__(self, "weight", Fraction(self.weight))

    def sort_key(self) -> tuple:
        return (self.label, self.weight)

    def __str__(self) -> str:
        return f"({self.label},{_fmt(self.weight)})"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


Letter = tuple  # sorted tuple of Decoration


def as_letter(x) -> Letter:
    if isinstance(x, Decoration):
        return (x,)
    if isinstance(x, tuple) and all(isinstance(d, Decoration) for d in x):
        return tuple(sorted(x))
    raise TypeError(f"not a decoration or letter: {x!r}")


def letter_labels(letter: Letter) -> frozenset:
    return frozenset(d.label for d in letter)


def letter_weight(letter: Letter) -> Fraction:
    return sum((d.weight for d in letter), Fraction(0))


def format_letter(letter: Letter) -> str:
    letter = as_letter(letter)
    if len(letter) == 1:
        return str(letter[0])
    return "{" + ",".join(str(d) for d in letter) + "}"


class LetterAlgebra(LocalityAlgebra):
    """Letters are multisets of decorations; independent when their labels
    are disjoint, and the product merges them."""

    unit: Letter = ()

    def independent(self, a, b) -> bool:
        return not (letter_labels(as_letter(a)) & letter_labels(as_letter(b)))

    def product(self, a, b):
        return tuple(sorted(as_letter(a) + as_letter(b)))

    def sort_key(self, a):
        return tuple(d.sort_key() for d in as_letter(a))


LETTERS = LetterAlgebra()


def decorate(x) -> SymbolGerm:
    """The symbol x^(sum over the letter of (-s + z_label))."""
    letter = as_letter(x)
    form = LinearForm([(d.label, 1) for d in letter])
    return SymbolGerm.monomial(AffineForm(form, -letter_weight(letter)))


def vertex(label: int, weight, children: Iterable[Tree] = ()) -> Tree:
    return make_tree((Decoration(label, weight),), children, LETTERS)


def forest_of(*trees: Tree) -> Forest:
    return Forest(trees)


def as_forest(F) -> Forest:
    return F if isinstance(F, Forest) else Forest((F,))


def forest_labels(F) -> list[int]:
    return sorted(d.label for letter in as_forest(F).decorations() for d in as_letter(letter))


def forest_weights(F) -> list[Fraction]:
    return [d.weight for letter in as_forest(F).decorations() for d in as_letter(letter)]


def relabel(F, mapping) -> Forest:
    """Apply the injection mapping (dict label -> label) to every decoration."""

    def tree(t: Tree) -> Tree:
        letter = tuple(Decoration(mapping.get(d.label, d.label), d.weight) for d in as_letter(t.decoration))
        return make_tree(tuple(sorted(letter)), [tree(c) for c in t.children], LETTERS)

    return Forest(tree(t) for t in as_forest(F))


def check_proper(F) -> None:
    F = as_forest(F)
    labels = forest_labels(F)
    if len(labels) != len(set(labels)):
        raise LocalityError("forest is not properly decorated: repeated labels")
    if not is_proper_forest(F, LETTERS):
        raise LocalityError("forest is not properly decorated")


def _words(lam: int, F) -> LinComb:
    """The flattening that matches the summation operator S_lam."""
    return flatten(rb_weight(lam), as_forest(F), LETTERS)


def candidate_poles(lam: int, F) -> list[LinearForm]:
    """Linear forms on which the regularised germ of F may have poles."""
    seen: dict = {}
    for word, _ in _words(lam, F).items():
        labels: list = []
        weight = Fraction(0)
        for j, letter in enumerate(word, start=1):
            labels.extend(d.label for d in letter)
            weight += letter_weight(letter)
            if j == 1:
                singular = weight == 1
            else:
                singular = weight.denominator == 1 and weight <= j
            if singular:
                seen.setdefault(LinearForm.sum_of(labels), None)
    return sorted(seen, key=lambda L: L.sort_key())


# ---------------------------------------------------------------------------
# exact route


class RouteMismatch(ArithmeticError):
    pass


def default_K(F) -> int:
    ws = forest_weights(F)
    return max(4, int(sum(max(-w, 0) for w in ws)) + len(ws) + 2)


def _symbol(lam: int, F: Forest, route: str, Q: InnerProduct, K: int, degree: int = 0) -> SymbolGerm:
    alg = SymbolAlgebra(lam, Q, K, depth=F.size + degree)
    if route == "branched":
        return branched_lift(alg.operator, F, alg, decorate)
    return lift_through_words(alg.operator, rb_weight(lam), F, alg, decorate, LETTERS)


def _finite_part(lam: int, F: Forest, route: str, Q: InnerProduct, K: int, degree: int = 0):
    """fp at infinity of the lifted symbol.  For several trees the product
    of the tree symbols is never formed in full."""
    if route != "branched" or len(F) < 2:
        return fp_infinity(_symbol(lam, F, route, Q, K, degree))
    alg = SymbolAlgebra(lam, Q, K, depth=F.size + degree)
    syms = [branched_lift(alg.operator, t, alg, decorate) for t in F]
    for a in range(len(syms)):
        for b in range(a + 1, len(syms)):
            if not alg.independent(syms[a], syms[b]):
                raise LocalityError("trees of the forest are not independent", (syms[a], syms[b]))
    return fp_of_product(syms, alg.depth)


def regularised_germ_exact(lam: int, F, route: str = "branched", Q: InnerProduct = IDENTITY,
                           K: int | None = None, retries: int = 3,
                           degree: int = 0) -> tuple[Germ, int]:
    """Exact regularised germ up to homogeneity `degree`, with the K finally used."""
    if lam not in (-1, 1):
        raise ValueError("lambda must be -1 (strict) or +1 (weak)")
    if route not in ("branched", "words"):
        raise ValueError(f"unknown route {route!r}")
    F = as_forest(F)
    check_proper(F)
    K = K or default_K(F)
    for attempt in range(retries + 1):
        try:
            fp = _finite_part(lam, F, route, Q, K, degree)
            return zeta_expand(fp, degree).truncate_homogeneity(degree), K
        except InsufficientDepth:
            if attempt == retries:
                raise
            K += 4
    raise AssertionError("unreachable")


def regularised_bzv_germ(lam: int, F, route: str = "branched", Q: InnerProduct = IDENTITY,
                         K: int | None = None, degree: int = 0) -> Germ:
    """Regularised germ by the branched lift, by flattening to words, or
    both (compared, raising RouteMismatch if they differ)."""
    if route == "both":
        g1, K1 = regularised_germ_exact(lam, F, "branched", Q, K, degree=degree)
        g2, _ = regularised_germ_exact(lam, F, "words", Q, K or K1, degree=degree)
        if not germ_equal(g1, g2, upto=degree):
            raise RouteMismatch("branched and word routes disagree")
        return g1
    return regularised_germ_exact(lam, F, route, Q, K, degree=degree)[0]


def renormalise(germ: Germ, Q: InnerProduct = IDENTITY):
    """ev_0 of pi_+ of a germ (exact)."""
    return evaluate_zero(project_plus(Q, germ, 0), Q)


def as_coeffpoly(x) -> CoeffPoly:
    return CoeffPoly.coerce(x)


# ---------------------------------------------------------------------------
# results


@dataclass
class BzvResult:
    germ: Germ | None
    value: object
    rational: dict
    residuals: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    mode: str = "exact"
    diagnostics: list = field(default_factory=list)

    def float_value(self) -> complex:
        v = self.value
        if isinstance(v, CoeffPoly):
            return complex(v.numeric(64))
        return complex(v)

    def to_json(self) -> dict:
        v = self.value
        if isinstance(v, CoeffPoly):
            value = {"exact": v.to_json(), "text": str(v), "float": _float_json(self.float_value())}
        else:
            value = {"float": _float_json(complex(v))}
        return {"germ": self.germ.to_json() if self.germ is not None else None,
                "value": value,
                "rational": self.rational,
                "residuals": self.residuals,
                "checks": self.checks,
                "mode": self.mode,
                "diagnostics": list(self.diagnostics)}


def _float_json(z: complex):
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z.real)):
        return float(repr(z.real)) if z.real == z.real else None
    return [z.real, z.imag]


def extrapolation_note(F) -> str | None:
    ws = forest_weights(F)
    if all(w <= -1 and w.denominator == 1 for w in ws):
        return None
    if all(w <= 0 and w.denominator == 1 for w in ws):
        return "weights include 0: rationality is an extrapolation beyond weights <= -1"
    return None


def renormalised_exact(lam: int, F, route: str = "branched", Q: InnerProduct = IDENTITY,
                       K: int | None = None) -> BzvResult:
    F = as_forest(F)
    checks: dict = {}
    germ, K_used = regularised_germ_exact(lam, F, "branched" if route == "both" else route, Q, K)
    if route == "both":
        other, _ = regularised_germ_exact(lam, F, "words", Q, K_used)
        checks["routes_agree"] = bool(germ_equal(germ, other, upto=0))
        if not checks["routes_agree"]:
            raise RouteMismatch("branched and word routes disagree")
    value = as_coeffpoly(renormalise(germ, Q))
    unknown = [c for c in value.constants() if c.is_unknown_function()]
    if unknown:
        raise InsufficientDepth(f"value depends on {len(unknown)} unresolved remainder constant(s)")
    rational = _rational_report(F, value)
    if rational["expected"]:
        checks["rational"] = rational["is_rational"]
    diagnostics = [f"K={K_used}"]
    note = extrapolation_note(F)
    if note:
        diagnostics.append(note)
    return BzvResult(germ, value, rational, {}, checks, "exact", diagnostics)


def _rational_report(F, value: CoeffPoly) -> dict:
    ws = forest_weights(F)
    covered = all(w <= -1 and w.denominator == 1 for w in ws)
    out = {"is_rational": value.is_rational(), "expected": covered}
    if value.is_rational():
        q = value.to_rational()
        out["value"] = _fmt(q)
    else:
        out["surviving_constants"] = sorted(str(c) for c in value.constants())
    if covered and not value.is_rational():
        out["falsification_witness"] = str(value)
    return out


# ---------------------------------------------------------------------------
# numeric route


@dataclass(frozen=True)
class EngineConfig:
    """Settings shared by the exact and numeric routes."""

    mode: str = "auto"                   # exact | numeric | auto
    K: int | None = None                 # exact Euler-Maclaurin terms (None: automatic)
    numeric: NumericConfig = NumericConfig()
    sampling: SamplingConfig = SamplingConfig()
    denominator_bound: int = 10 ** 6
    tolerance: float = 1e-9
    precision_bits: int = 64
    threads: int = 1

    def to_json(self) -> dict:
        return {"mode": self.mode, "K": self.K, "numeric": self.numeric.to_json(),
                "sampling": {"radius": self.sampling.radius, "ring": self.sampling.ring,
                             "oversample": self.sampling.oversample,
                             "margin": self.sampling.margin, "seed": self.sampling.seed},
                "denominator_bound": self.denominator_bound, "tolerance": self.tolerance,
                "precision_bits": self.precision_bits}


def numeric_vertex(t: Tree) -> NumVertex:
    letter = tuple((d.label, int(d.weight) if d.weight.denominator == 1 else d.weight)
                   for d in as_letter(t.decoration))
    return NumVertex(letter, tuple(numeric_vertex(c) for c in t.children))


def _word_letters(word) -> list:
    out = []
    for letter in word:
        if isinstance(letter, (Decoration, tuple)) and (
                isinstance(letter, Decoration) or all(isinstance(d, Decoration) for d in letter)):
            out.append(tuple((d.label, d.weight) for d in as_letter(letter)))
        else:
            out.append(tuple(letter))
    return out


def numeric_word_value(word: Sequence, z=None, lam: int = -1,
                       cfg: NumericConfig = NumericConfig()) -> complex:
    """Regularised word germ at a numeric point (letters outermost first;
    a letter is a Decoration, a tuple of them, or (label, weight) pairs)."""
    return _numeric_word_value(_word_letters(word), z, lam, cfg)


def forest_numeric_values(lam: int, F, z, cfg: NumericConfig = NumericConfig()):
    """Regularised germ of F at sample points z (label -> array)."""
    return forest_values([numeric_vertex(t) for t in as_forest(F)], lam, z, cfg)


def convergent_value(lam: int, F, cfg: NumericConfig = NumericConfig()) -> float:
    """The convergent nested sum of a forest with all weights >= 2."""
    F = as_forest(F)
    check_proper(F)
    if any(w < 2 for w in forest_weights(F)):
        raise ValueError("convergent_value needs every weight >= 2")
    v = forest_numeric_values(lam, F, {0: np.zeros(1)}, cfg)[0]
    return float(complex(v).real)


def _coupled(Q: InnerProduct, F: Forest) -> bool:
    groups = [set(forest_labels(t)) for t in F]
    for a, ga in enumerate(groups):
        for gb in groups[a + 1:]:
            if any(Q.value(i, j) for i in ga for j in gb):
                return True
    return False


_TREE_CACHE: dict = {}


def numeric_tree_germ(lam: int, t: Tree, Q: InnerProduct = IDENTITY, top_degree: int = 0,
                      config: EngineConfig = EngineConfig()) -> tuple[Germ, dict]:
    """Fitted regularised germ of one tree, homogeneous components up to top_degree."""
    key = (t.key, lam, Q, top_degree, config.numeric, config.sampling)
    hit = _TREE_CACHE.get(key)
    if hit is not None:
        return hit
    variables = forest_labels(t)
    forms = candidate_poles(lam, t)
    r = t.size
    s = config.sampling
    bases = {d: polar_basis(Q, variables, forms, d, r) for d in range(-r, top_degree + 1)}
    dim = max(len(b) for b in bases.values())
    count = max(int(s.oversample * dim), dim + 8, 4)
    dirs = sample_directions(variables, forms, count, s.margin, s.seed)
    ts = s.radius * np.exp(2j * np.pi * np.arange(s.ring) / s.ring)
    z = {v: (dirs[:, k][:, None] * ts[None, :]).ravel() for k, v in enumerate(variables)}
    vals = forest_values([numeric_vertex(t)], lam, z, config.numeric)
    ring = np.asarray(vals, dtype=complex).reshape(count, s.ring)
    germ, report = fit_components(ring, dirs, ts, variables, bases)
    out = (germ, {"samples": count * s.ring, "components": report})
    _TREE_CACHE[key] = out
    return out


def renormalised_numeric(lam: int, F, Q: InnerProduct = IDENTITY,
                         config: EngineConfig = EngineConfig()) -> BzvResult:
    F = as_forest(F)
    check_proper(F)
    sizes = [t.size for t in F]
    coupled = _coupled(Q, F)
    germ = Germ.one()
    residuals: dict = {}
    tops = [sum(sizes) - n if coupled else 0 for n in sizes]
    jobs = list(zip(F, tops))
    if config.threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            fitted = list(pool.map(lambda job: numeric_tree_germ(lam, job[0], Q, job[1], config), jobs))
    else:
        fitted = [numeric_tree_germ(lam, t, Q, top, config) for t, top in jobs]
    for k, (g, rep) in enumerate(fitted):
        germ = germ * g
        residuals[f"tree{k}"] = rep
    value = complex(float(as_coeffpoly(renormalise(germ, Q)).to_rational()))
    q = rational_reconstruct(value.real, config.denominator_bound, config.tolerance)
    rational = {"reconstructed": _fmt(q) if q is not None else None,
                "expected": all(w <= -1 and w.denominator == 1 for w in forest_weights(F))}
    worst = max((c["residual"] for rep in residuals.values()
                 for c in rep["components"].values()), default=0.0)
    checks = {"fit_residual_ok": bool(worst < 1e-6)}
    diagnostics = [f"worst fit residual {worst:.3g}"]
    note = extrapolation_note(F)
    if note:
        diagnostics.append(note)
    return BzvResult(None, value, rational, residuals, checks, "numeric", diagnostics)


def renormalised_bzv(lam: int, F, Q: InnerProduct = IDENTITY, config: EngineConfig = EngineConfig(),
                     route: str = "branched") -> BzvResult:
    """ev_0 pi_+ of the regularised germ.  In auto mode exact arithmetic is
    tried first and numeric fitting is the fallback."""
    if config.mode not in ("exact", "numeric", "auto"):
        raise ValueError(f"unknown mode {config.mode!r}")
    if config.mode == "numeric":
        return renormalised_numeric(lam, F, Q, config)
    try:
        res = renormalised_exact(lam, F, route, Q, config.K)
    except (InsufficientDepth, PoleError) as exc:
        if config.mode == "exact":
            raise
        res = renormalised_numeric(lam, F, Q, config)
        res.diagnostics.insert(0, f"exact mode insufficient ({exc}); fell back to numeric")
        return res
    return res
