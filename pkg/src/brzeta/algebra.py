"""Words and non-planar decorated rooted forests over a locality algebra of
decorations: quasi-shuffle products, the flattening map, the free locality
Rota-Baxter operator, and the word and branched lifts of an operator."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Sequence

from .numerics import faulhaber_polynomial

Word = tuple


class LocalityError(ValueError):
    """A partial operation was invoked on a pair that is not independent."""

    def __init__(self, message: str, pair: tuple = ()):
        super().__init__(message)
        self.pair = pair


# ---------------------------------------------------------------------------
# locality algebras


class LocalityAlgebra:
    """Interface: independence relation, partial product and unit.

    Subclasses may carry a Rota-Baxter operator `operator` of weight
    `weight`.
    """

    unit: Any = None
    commutative = True

    def independent(self, a, b) -> bool:
        raise NotImplementedError

    def product(self, a, b):
        raise NotImplementedError

    def checked_product(self, a, b):
        if not self.independent(a, b):
            raise LocalityError(f"product of dependent elements {a!r}, {b!r}", (a, b))
        return self.product(a, b)

    def sort_key(self, a) -> Any:
        key = getattr(a, "sort_key", None)
        if callable(key):
            return key()
        return repr(a)


class DisjointUnionAlgebra(LocalityAlgebra):
    """Decorations are frozensets; independent iff disjoint; product is union."""

    unit = frozenset()

    def independent(self, a, b) -> bool:
        return not (a & b)

    def product(self, a, b):
        return a | b

    def sort_key(self, a):
        return tuple(sorted(repr(x) for x in a))


def rb_weight(summation_lambda: int) -> int:
    """Rota-Baxter weight of the summation operator S_lambda.

    The strict sum (lambda = -1) has weight +1 and pairs with the stuffle
    star_{+1}; the weak sum (lambda = +1) has weight -1 and pairs with
    star_{-1}; integration (lambda = 0) has weight 0.  The flattening and
    quasi-shuffle parameter is always this weight.
    """
    if summation_lambda not in (-1, 0, 1):
        raise ValueError("summation lambda must be -1, 0 or 1")
    return -summation_lambda


# ---------------------------------------------------------------------------
# linear combinations


class LinComb:
    """Finite formal linear combination with no stored zero coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | Iterable = ()):
        self.terms: dict = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for k, c in items:
            self._add(k, c)

    def _add(self, key, c) -> None:
        if not c:
            return
        s = self.terms.get(key)
        s = c if s is None else s + c
        if s:
            self.terms[key] = s
        else:
            self.terms.pop(key, None)

    @classmethod
    def _from_dict(cls, acc: dict) -> "LinComb":
        """Take ownership of a dict of distinct keys, dropping zeros."""
        out = cls()
        out.terms = {k: c for k, c in acc.items() if c}
        return out

    @classmethod
    def single(cls, key, c=1) -> "LinComb":
        out = cls()
        out._add(key, c)
        return out

    def __add__(self, other: "LinComb") -> "LinComb":
        out = LinComb._from_dict(self.terms)
        for k, c in other.terms.items():
            out._add(k, c)
        return out

    def __sub__(self, other: "LinComb") -> "LinComb":
        return self + other.scale(-1)

    def scale(self, s) -> "LinComb":
        return LinComb((k, c * s) for k, c in self.terms.items())

    def map_keys(self, f: Callable) -> "LinComb":
        return LinComb((f(k), c) for k, c in self.terms.items())

    def items(self):
        return self.terms.items()

    def __iter__(self) -> Iterator:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinComb) and self.terms == other.terms

    def __getitem__(self, key):
        return self.terms.get(key, 0)

    def __repr__(self) -> str:
        return "LinComb(" + ", ".join(f"{c}*{k!r}" for k, c in self.terms.items()) + ")"


# ---------------------------------------------------------------------------
# words


def is_proper(word: Sequence, alg: LocalityAlgebra) -> bool:
    return all(alg.independent(a, b) for a, b in itertools.combinations(word, 2))


def _require_proper(word: Sequence, alg: LocalityAlgebra) -> None:
    for a, b in itertools.combinations(word, 2):
        if not alg.independent(a, b):
            raise LocalityError(f"word is not proper: {a!r} and {b!r} are dependent", (a, b))


def _require_mutual(w1: Sequence, w2: Sequence, alg: LocalityAlgebra) -> None:
    for a in w1:
        for b in w2:
            if not alg.independent(a, b):
                raise LocalityError(f"{a!r} and {b!r} are dependent", (a, b))


def _shuffler(lam, alg: LocalityAlgebra) -> Callable[[Word, Word], dict]:
    """Memoised recursion for the quasi-shuffle; the memo may be shared by
    many products over the same letters, which is where the time goes."""
    memo: dict = {}
    product = alg.product

    def rec(a: Word, b: Word) -> dict:
        if not a:
            return {b: 1}
        if not b:
            return {a: 1}
        key = (a, b)
        hit = memo.get(key)
        if hit is not None:
            return hit
        a0, b0 = a[0], b[0]
        out = {(a0,) + w: c for w, c in rec(a[1:], b).items()}
        parts = [(b0, rec(a, b[1:]), 1)]
        if lam:
            parts.append((product(a0, b0), rec(a[1:], b[1:]), lam))
        for prefix, sub, factor in parts:
            for w, c in sub.items():
                k = (prefix,) + w
                s = out.get(k, 0) + (c if factor == 1 else c * factor)
                if s:
                    out[k] = s
                else:
                    del out[k]
        memo[key] = out
        return out

    return rec


def quasi_shuffle(lam, w1: Word, w2: Word, alg: LocalityAlgebra,
                  check: bool = True) -> LinComb:
    """The lambda-quasi-shuffle w1 *_lambda w2 of two independent proper words."""
    w1, w2 = tuple(w1), tuple(w2)
    if check:
        _require_proper(w1, alg)
        _require_proper(w2, alg)
        _require_mutual(w1, w2, alg)
    return LinComb._from_dict(_shuffler(lam, alg)(w1, w2))


_END = object()


def _trie(x: LinComb) -> dict:
    root: dict = {}
    for w, c in x.items():
        node = root
        for a in w:
            node = node.setdefault(a, {})
        node[_END] = node.get(_END, 0) + c
    return root


def star(lam, x: LinComb, y: LinComb, alg: LocalityAlgebra) -> LinComb:
    """Bilinear extension of the quasi-shuffle to linear combinations.

    x is stored as a prefix tree and the recursion builds a shared graph of
    (letter, factor, rest) branches; words are only spelled out once, when
    the paths of that graph are enumerated.
    """
    for u in x:
        _require_proper(u, alg)
    for v in y:
        _require_proper(v, alg)
    for u in x:
        for v in y:
            _require_mutual(u, v, alg)
    if len(y) > len(x):
        if not alg.commutative:
            return _star_words(lam, x, y, alg)
        x, y = y, x
    root = _trie(x)
    product = alg.product
    acc: dict = {}
    for v, cv in y.items():
        v = tuple(v)
        n = len(v)
        memo: dict = {}

        def rec(node: dict, j: int) -> tuple:
            key = (id(node), j)
            hit = memo.get(key)
            if hit is not None:
                return hit
            branches = []
            kids = [(a, child) for a, child in node.items() if a is not _END]
            for a, child in kids:
                branches.append((a, 1, rec(child, j)))
            if j < n:
                vj = v[j]
                branches.append((vj, 1, rec(node, j + 1)))
                if lam:
                    for a, child in kids:
                        branches.append((product(a, vj), lam, rec(child, j + 1)))
                end = 0
            else:
                end = node.get(_END, 0)
            out = (end, branches)
            memo[key] = out
            return out

        get = acc.get
        stack = [(rec(root, 0), (), cv)]
        while stack:
            (end, branches), word, c = stack.pop()
            if end:
                acc[word] = get(word, 0) + c * end
            for a, f, sub in branches:
                stack.append((sub, word + (a,), c if f == 1 else c * f))
    return LinComb._from_dict(acc)


def _star_words(lam, x: LinComb, y: LinComb, alg: LocalityAlgebra) -> LinComb:
    rec = _shuffler(lam, alg)
    acc: dict = {}
    get = acc.get
    for u, cu in x.items():
        for v, cv in y.items():
            f = cu * cv
            for w, c in rec(tuple(u), tuple(v)).items():
                acc[w] = get(w, 0) + f * c
    return LinComb._from_dict(acc)


def diamond_product(lam, u: Word, v: Word, alg: LocalityAlgebra) -> LinComb:
    """(a w) <>_lambda (b w') = (a.b)(w *_lambda w') on nonempty words."""
    u, v = tuple(u), tuple(v)
    if not u or not v:
        raise ValueError("diamond product is defined on nonempty words")
    _require_proper(u, alg)
    _require_proper(v, alg)
    _require_mutual(u, v, alg)
    head = alg.product(u[0], v[0])
    return quasi_shuffle(lam, u[1:], v[1:], alg, check=False).map_keys(lambda w: (head,) + w)


def diamond(lam, x: LinComb, y: LinComb, alg: LocalityAlgebra) -> LinComb:
    out = LinComb()
    for u, cu in x.items():
        for v, cv in y.items():
            for w, c in diamond_product(lam, u, v, alg).items():
                out._add(w, cu * cv * c)
    return out


def free_rb_operator(word: Word, alg: LocalityAlgebra) -> Word:
    """P_A(w) = 1 w: prepend the unit letter."""
    return (alg.unit,) + tuple(word)


# ---------------------------------------------------------------------------
# non-planar decorated rooted forests


class Tree:
    __slots__ = ("decoration", "children", "key", "_hash", "size")

    def __init__(self, decoration, children: "Forest", key):
        self.decoration = decoration
        self.children = children
        self.key = key
        self._hash = hash(key)
        self.size = 1 + children.size

    def __eq__(self, other) -> bool:
        return isinstance(other, Tree) and self.key == other.key

    def __hash__(self) -> int:
        return self._hash

    def decorations(self) -> list:
        return [self.decoration] + self.children.decorations()

    def height(self) -> int:
        return 1 + self.children.height()

    def __repr__(self) -> str:
        return format_forest(Forest((self,)), repr)


class Forest:
    """Multiset of trees in canonical order; the empty forest is the unit."""

    __slots__ = ("trees", "key", "_hash", "size")

    def __init__(self, trees: Iterable[Tree] = ()):
        self.trees = tuple(sorted(trees, key=lambda t: t.key))
        self.key = tuple(t.key for t in self.trees)
        self._hash = hash(self.key)
        self.size = sum(t.size for t in self.trees)

    def __eq__(self, other) -> bool:
        return isinstance(other, Forest) and self.key == other.key

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __mul__(self, other: "Forest") -> "Forest":
        return Forest(self.trees + other.trees)

    def decorations(self) -> list:
        out = []
        for t in self.trees:
            out.extend(t.decorations())
        return out

    def height(self) -> int:
        return max((t.height() for t in self.trees), default=0)

    def __repr__(self) -> str:
        return format_forest(self, repr)


EMPTY_FOREST = Forest()


def make_tree(decoration, children: Iterable[Tree] | Forest = (),
              alg: LocalityAlgebra | None = None) -> Tree:
    """Build a tree without locality checks (see b_plus for the checked one)."""
    forest = children if isinstance(children, Forest) else Forest(children)
    keyf = alg.sort_key if alg is not None else LocalityAlgebra.sort_key.__get__(None, LocalityAlgebra)
    return Tree(decoration, forest, (keyf(decoration), forest.key))


def is_proper_forest(forest: Forest, alg: LocalityAlgebra) -> bool:
    return is_proper(forest.decorations(), alg)


def b_plus(omega, forest: Forest, alg: LocalityAlgebra) -> Tree:
    """Graft the trees of the forest onto a new root decorated by omega."""
    for d in forest.decorations():
        if not alg.independent(omega, d):
            raise LocalityError(f"root {omega!r} is dependent on {d!r}", (omega, d))
    return make_tree(omega, forest, alg)


def flatten(lam, forest: Forest | Tree, alg: LocalityAlgebra) -> LinComb:
    """The lambda-flattening of a proper forest into words."""
    if isinstance(forest, Tree):
        forest = Forest((forest,))
    _require_proper(forest.decorations(), alg)
    memo: dict = {}

    def of_tree(t: Tree) -> LinComb:
        if t.key in memo:
            return memo[t.key]
        inner = of_forest(t.children)
        out = inner.map_keys(lambda w: (t.decoration,) + w)
        memo[t.key] = out
        return out

    def of_forest(f: Forest) -> LinComb:
        acc = LinComb.single(())
        for t in f.trees:
            acc = star(lam, acc, of_tree(t), alg)
        return acc

    return of_forest(forest)


def word_lift(P: Callable, word: Word, alg: LocalityAlgebra,
              decorate: Callable | None = None):
    """P^(w): P^(omega w) = P(omega . P^(w)), P^(empty) = unit."""
    dec = decorate or (lambda x: x)
    value = alg.unit
    for letter in reversed(tuple(word)):
        value = P(alg.checked_product(dec(letter), value))
    return value


def word_lifts(P: Callable, words: Iterable[Word], alg: LocalityAlgebra,
               decorate: Callable | None = None) -> dict:
    """word_lift for many words at once; common suffixes are lifted once."""
    dec = decorate or (lambda x: x)
    memo: dict = {(): alg.unit}

    def lift(w: tuple):
        if w not in memo:
            memo[w] = P(alg.checked_product(dec(w[0]), lift(w[1:])))
        return memo[w]

    return {w: lift(tuple(w)) for w in words}


def branched_lift(P: Callable, forest: Forest | Tree, alg: LocalityAlgebra,
                  decorate: Callable | None = None):
    """P^ on forests: multiplicative, P^(B+^omega F) = P(omega . P^(F))."""
    dec = decorate or (lambda x: x)
    if isinstance(forest, Tree):
        forest = Forest((forest,))
    memo: dict = {}

    def of_tree(t: Tree):
        if t.key not in memo:
            memo[t.key] = P(alg.checked_product(dec(t.decoration), of_forest(t.children)))
        return memo[t.key]

    def of_forest(f: Forest):
        value = alg.unit
        for t in f.trees:
            value = alg.checked_product(value, of_tree(t))
        return value

    return of_forest(forest)


def lift_through_words(P: Callable, lam, forest: Forest | Tree, alg: LocalityAlgebra,
                       decorate: Callable | None = None,
                       letter_product: LocalityAlgebra | None = None):
    """Sum over flatten(lam, F) of coefficient * word_lift(P, word).

    letter_product is the algebra used to flatten (defaults to alg); its
    merged letters are mapped into alg by decorate.
    """
    words = flatten(lam, forest, letter_product or alg)
    lifts = word_lifts(P, [w for w, _ in words.items()], alg, decorate)
    total = None
    for w, c in words.items():
        term = alg.scale(lifts[w], c)
        total = term if total is None else alg.add(total, term)
    return total if total is not None else alg.unit


# ---------------------------------------------------------------------------
# locality law checker


@dataclass
class LawCheck:
    law: str
    passed: bool
    witness: tuple | None = None
    checked: int = 0


@dataclass
class LocalityReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def witness(self, law: str):
        for c in self.checks:
            if c.law == law:
                return c.witness
        return None

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else f"FAIL witness={c.witness!r}"
            lines.append(f"{c.law}: {status} ({c.checked} cases)")
        return "\n".join(lines)


def check_locality_laws(structure, samples: Sequence, probes: Sequence | None = None,
                        equal: Callable | None = None,
                        commutative: bool | None = None) -> LocalityReport:
    """Check closure of polar sets, associativity and commutativity.

    structure exposes independent(a, b) and product(a, b).  probes are the
    subsets U used for the polar-set condition (default: singletons of the
    samples).  Failures are reported with the first witness found.
    """
    eq = equal or (lambda a, b: a == b)
    ind = structure.independent
    mul = structure.product
    probes = [tuple(u) for u in probes] if probes is not None else [(s,) for s in samples]
    report = LocalityReport()

    closure = LawCheck("closure", True)
    for U in probes:
        polar = [x for x in samples if all(ind(x, u) for u in U)]
        for a in polar:
            for b in polar:
                if not ind(a, b):
                    continue
                closure.checked += 1
                ab = mul(a, b)
                if not all(ind(ab, u) for u in U):
                    closure.passed = False
                    closure.witness = (a, b)
                    break
            if not closure.passed:
                break
        if not closure.passed:
            break
    report.checks.append(closure)

    assoc = LawCheck("associativity", True)
    for a, b, c in itertools.product(samples, repeat=3):
        if not (ind(a, b) and ind(b, c) and ind(a, c)):
            continue
        ab, bc = mul(a, b), mul(b, c)
        if not (ind(ab, c) and ind(a, bc)):
            continue
        assoc.checked += 1
        if not eq(mul(ab, c), mul(a, bc)):
            assoc.passed = False
            assoc.witness = (a, b, c)
            break
    report.checks.append(assoc)

    if commutative if commutative is not None else getattr(structure, "commutative", False):
        comm = LawCheck("commutativity", True)
        for a, b in itertools.product(samples, repeat=2):
            if not ind(a, b):
                continue
            comm.checked += 1
            if not eq(mul(a, b), mul(b, a)):
                comm.passed = False
                comm.witness = (a, b)
                break
        report.checks.append(comm)
    return report


class RationalsModZ:
    """(Q, x T y iff x + y not in Z, +): a partial semigroup that is not a
    locality semigroup."""

    commutative = True

    def independent(self, a, b) -> bool:
        return (Fraction(a) + Fraction(b)).denominator != 1

    def product(self, a, b):
        return Fraction(a) + Fraction(b)


class WordConcatenation:
    """Proper words over a locality algebra of letters under concatenation."""

    commutative = False

    def __init__(self, letters: LocalityAlgebra):
        self.letters = letters

    def independent(self, u, v) -> bool:
        return all(self.letters.independent(a, b) for a in u for b in v)

    def product(self, u, v):
        return tuple(u) + tuple(v)


# ---------------------------------------------------------------------------
# partial sums of polynomial functions on Z>=1 (reference RB algebra)


def _poly_trim(c: list) -> tuple:
    while c and not c[-1]:
        c.pop()
    return tuple(c)


def poly_mul(a: Sequence, b: Sequence) -> tuple:
    if not a or not b:
        return ()
    if len(b) < len(a):
        a, b = b, a
    support = [i for i, x in enumerate(a) if x]
    if len(support) == 1:
        # monomial times polynomial: a shift
        i = support[0]
        x = a[i]
        shifted = tuple(b) if x == 1 else tuple(x * y for y in b)
        return _poly_trim([Fraction(0)] * i + list(shifted))
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def poly_add(a: Sequence, b: Sequence) -> tuple:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] += y
    return _poly_trim(out)


def poly_eval(a: Sequence, n) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * n + c
    return acc


class PartialSumAlgebra(LocalityAlgebra):
    """Polynomial functions of n on Z>=1 with pointwise product.

    Elements are coefficient tuples (c_0, c_1, ...).  The operator is the
    strict partial sum P(f)(n) = sum_{m<n} f(m) (weight +1) or the weak one
    sum_{m<=n} f(m) (weight -1).  Every pair is independent.
    """

    unit = (Fraction(1),)

    def __init__(self, strict: bool = True):
        self.strict = strict
        self.weight = 1 if strict else -1
        self._memo: dict = {}

    def independent(self, a, b) -> bool:
        return True

    def product(self, a, b):
        return poly_mul(a, b)

    def add(self, a, b):
        return poly_add(a, b)

    def scale(self, a, c):
        return _poly_trim([x * c for x in a])

    def sort_key(self, a):
        return tuple((x.numerator, x.denominator) for x in map(Fraction, a))

    def operator(self, f: Sequence):
        f = tuple(f)
        out = self._memo.get(f)
        if out is None:
            acc = [Fraction(0)] * (len(f) + 1)
            for k, c in enumerate(f):
                if c:
                    for i, x in enumerate(faulhaber_polynomial(k, strict=self.strict)):
                        acc[i] += c * x
            out = self._memo[f] = _poly_trim(acc)
        return out

    __call__ = operator

    def evaluate(self, f: Sequence, n: int) -> Fraction:
        return poly_eval(f, n)


# ---------------------------------------------------------------------------
# canonical text form:  forest := tree (',' tree)* | 'empty'
#                       tree   := 'T(' decoration ')' ('[' forest ']')?


class ForestSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_WS = re.compile(r"\s*")


def parse_forest_text(text: str, parse_decoration: Callable[[str, int], Any],
                      build: Callable[[Any, list], Any]) -> list:
    """Parse the canonical grammar into a list of built trees.

    parse_decoration(body, position) turns the text inside T(...) into a
    decoration; build(decoration, children) constructs a tree.
    """
    pos = 0

    def skip():
        nonlocal pos
        pos = _WS.match(text, pos).end()

    def expect(tok: str):
        nonlocal pos
        skip()
        if not text.startswith(tok, pos):
            found = text[pos] if pos < len(text) else "end of input"
            raise ForestSyntaxError(f"expected {tok!r}, found {found!r}", pos)
        pos += len(tok)

    def tree():
        nonlocal pos
        expect("T(")
        start = pos
        depth = 0
        while pos < len(text):
            ch = text[pos]
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth == 0:
                    break
                depth -= 1
            pos += 1
        if pos >= len(text):
            raise ForestSyntaxError("unterminated decoration", start)
        dec = parse_decoration(text[start:pos], start)
        pos += 1
        skip()
        children: list = []
        if text.startswith("[", pos):
            pos += 1
            children = forest(closing="]")
            expect("]")
        return build(dec, children)

    def forest(closing: str | None = None):
        nonlocal pos
        skip()
        if text.startswith("empty", pos):
            pos += len("empty")
            return []
        if closing and text.startswith(closing, pos):
            return []
        items = [tree()]
        skip()
        while text.startswith(",", pos):
            pos += 1
            items.append(tree())
            skip()
        return items

    result = forest()
    skip()
    if pos != len(text):
        raise ForestSyntaxError(f"unexpected {text[pos]!r}", pos)
    return result


def format_forest(forest: Forest, format_decoration: Callable[[Any], str]) -> str:
    if not forest.trees:
        return "empty"

    def tree(t: Tree) -> str:
        s = f"T({format_decoration(t.decoration)})"
        if t.children.trees:
            s += "[" + ",".join(tree(c) for c in t.children.trees) + "]"
        return s

    return ",".join(tree(t) for t in forest.trees)


def format_word(word: Word, format_letter: Callable[[Any], str] = str) -> str:
    return ";".join(format_letter(a) for a in word)
