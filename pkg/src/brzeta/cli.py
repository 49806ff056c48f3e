"""Command line front end: brzeta flatten | zeta | check | cache."""

from __future__ import annotations

import argparse
import os
import re
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

from .algebra import (Forest, ForestSyntaxError, LocalityError, flatten, format_forest,
                      make_tree, parse_forest_text)
from .cache import Cache, canonical_json, resolve_cache_dir
from .checks import SUITES, run_suites
from .fitting import SamplingConfig
from .linear import IDENTITY, InnerProduct
from .numerics import CoeffPoly
from .germs import Germ
from .zeta import (LETTERS, BzvResult, Decoration, EngineConfig, as_forest, as_letter,
                   forest_numeric_values, format_letter, letter_weight, numeric_tree_germ,
                   regularised_bzv_germ, renormalised_bzv)

EXIT_OK, EXIT_ERROR, EXIT_CHECK = 0, 1, 2


class ForestParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# ---------------------------------------------------------------------------
# forest text

_FIELD = re.compile(r"\s*([ls])\s*=\s*([+-]?\d+(?:/\d+)?)\s*")


def _parse_decoration(body: str, position: int, counter: list) -> tuple:
    label = weight = None
    offset = 0
    for part in body.split(","):
        m = _FIELD.fullmatch(part)
        if not m:
            raise ForestParseError(f"bad decoration field {part.strip()!r}", position + offset)
        key, val = m.groups()
        if key == "l":
            if label is not None:
                raise ForestParseError("label given twice", position + offset)
            label = int(val)
            if label < 1:
                raise ForestParseError("labels must be >= 1", position + offset)
        else:
            if weight is not None:
                raise ForestParseError("weight given twice", position + offset)
            weight = Fraction(val)
        offset += len(part) + 1
    if weight is None:
        raise ForestParseError("missing weight s=...", position)
    counter[0] += 1
    return (label, weight, counter[0], position)


def parse_forest(text: str) -> Forest:
    """Parse e.g. "T(s=2)[T(s=3),T(l=5,s=-1)]".

    Vertices without an explicit label get their position in depth-first
    order (1, 2, ...).  Repeated labels are an error.
    """
    counter = [0]
    raw: list = []

    def build(dec, children):
        return (dec, children)

    try:
        trees = parse_forest_text(text, lambda body, pos: _parse_decoration(body, pos, counter), build)
    except ForestSyntaxError as exc:
        raise ForestParseError(str(exc).rsplit(" at position", 1)[0], exc.position) from None

    def collect(node):
        raw.append(node[0])
        for c in node[1]:
            collect(c)

    for t in trees:
        collect(t)
    seen: dict = {}
    for label, _, index, pos in raw:
        lab = label if label is not None else index
        if lab in seen:
            raise ForestParseError(f"duplicate label {lab}", pos)
        seen[lab] = pos

    def make(node):
        (label, weight, index, _), children = node
        dec = Decoration(label if label is not None else index, weight)
        return make_tree((dec,), [make(c) for c in children], LETTERS)

    return Forest(make(t) for t in trees)


def _fmt_q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_forest_text(F) -> str:
    """Canonical text; explicit labels only where they differ from the position."""
    counter = [0]

    def dec(letter):
        counter[0] += 1
        parts = []
        for d in as_letter(letter):
            if d.label != counter[0] or len(as_letter(letter)) > 1:
                parts.append(f"l={d.label}")
            parts.append(f"s={_fmt_q(d.weight)}")
        return ",".join(parts)

    return format_forest(as_forest(F), dec)


def word_json(word) -> list:
    return [[[d.label, _fmt_q(d.weight)] for d in as_letter(a)] for a in word]


def word_text(word) -> str:
    return ";".join(format_letter(a) for a in word)


def word_weights(word) -> str:
    return "(" + ",".join(_fmt_q(letter_weight(as_letter(a))) for a in word) + ")"


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    lam: int = -1
    mode: str = "auto"
    precision_bits: int = 64
    K: int | None = None
    degree_bound: int = 0
    denominator_bound: int = 10 ** 6
    Q_file: str | None = None
    cache_dir: str | None = None
    seed: int = 0
    threads: int = 1

    def validate(self) -> None:
        if self.mode not in ("exact", "numeric", "auto"):
            raise ValueError(f"mode must be exact, numeric or auto, not {self.mode!r}")
        if self.precision_bits < 53:
            raise ValueError("precision_bits must be >= 53")
        if self.K is not None and self.K < 2:
            raise ValueError("K must be >= 2")
        if self.degree_bound < 0:
            raise ValueError("degree_bound must be >= 0")
        if self.denominator_bound < 1:
            raise ValueError("denominator_bound must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.Q_file is not None and not os.path.isfile(self.Q_file):
            raise ValueError(f"inner product file {self.Q_file!r} not found")

    def inner_product(self) -> InnerProduct:
        return InnerProduct.load(self.Q_file) if self.Q_file else IDENTITY

    def engine(self) -> EngineConfig:
        return EngineConfig(mode=self.mode, K=self.K, sampling=SamplingConfig(seed=self.seed),
                            denominator_bound=self.denominator_bound,
                            precision_bits=self.precision_bits, threads=self.threads)

    def to_json(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d.pop("threads")
        d.pop("cache_dir")
        if self.Q_file:
            d["Q"] = self.inner_product().to_json()
        return d


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", help="emit JSON")
    p.add_argument("--lambda", dest="lam", type=int, default=None,
                   help="zeta: -1 strict, +1 weak; flatten: quasi-shuffle parameter")
    p.add_argument("--mode", choices=["exact", "numeric", "auto"], default="auto")
    p.add_argument("--precision-bits", type=int, default=64)
    p.add_argument("--K", type=int, default=None, help="Euler-Maclaurin terms (exact mode)")
    p.add_argument("--degree-bound", type=int, default=0)
    p.add_argument("--denominator-bound", type=int, default=10 ** 6)
    p.add_argument("--Q-file", default=None, help="JSON inner product file")
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="brzeta", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    f = sub.add_parser("flatten", parents=[common], help="flatten a forest into words")
    f.add_argument("forest")
    z = sub.add_parser("zeta", parents=[common], help="regularised germ or renormalised value")
    z.add_argument("forest")
    z.add_argument("--route", choices=["branched", "words", "both"], default="branched")
    z.add_argument("--renormalise", action="store_true")
    z.add_argument("--at", default=None, help="numeric point, e.g. '0.1,0.2' or '1=0.1,3=0.2'")
    c = sub.add_parser("check", parents=[common], help="run invariant suites")
    c.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    k = sub.add_parser("cache", parents=[common], help="inspect the result cache")
    k.add_argument("action", choices=["list", "clear"])
    return parser


def config_from_args(args, default_lambda: int = -1) -> RunConfig:
    cfg = RunConfig(lam=args.lam if args.lam is not None else default_lambda, mode=args.mode,
                    precision_bits=args.precision_bits, K=args.K, degree_bound=args.degree_bound,
                    denominator_bound=args.denominator_bound, Q_file=args.Q_file,
                    cache_dir=args.cache_dir, seed=args.seed, threads=args.threads)
    cfg.validate()
    return cfg


def parse_point(text: str) -> dict:
    out = {}
    parts = [p for p in text.split(",") if p.strip()]
    for i, part in enumerate(parts, start=1):
        if "=" in part:
            k, v = part.split("=", 1)
            out[int(k)] = complex(v.strip().replace("i", "j"))
        else:
            out[i] = complex(part.strip().replace("i", "j"))
    return out


# ---------------------------------------------------------------------------
# commands


def _emit(out, payload: dict, as_json: bool, human: list[str]) -> None:
    if as_json:
        out.write(canonical_json(payload) + "\n")
    else:
        out.write("\n".join(human) + "\n")


def cmd_flatten(args, out) -> int:
    cfg = config_from_args(args, default_lambda=1)
    F = parse_forest(args.forest)
    words = flatten(cfg.lam, F, LETTERS)
    items = sorted(words.items(), key=lambda wc: (-len(wc[0]), [LETTERS.sort_key(a) for a in wc[0]]))
    payload = {"forest": format_forest_text(F), "lambda": cfg.lam,
               "merge_policy": "merged letters are multisets of (label,weight) pairs; "
                               "weights add and labels are joined",
               "words": [{"coefficient": _fmt_q(Fraction(c)), "word": word_json(w),
                          "weights": word_weights(w), "text": word_text(w)} for w, c in items]}
    terms = []
    for w, c in items:
        c = Fraction(c)
        merged = any(len(as_letter(a)) > 1 for a in w)
        prefix = f"{_fmt_q(c)}·" if merged or c != 1 else ""
        terms.append(prefix + word_weights(w))
    human = [" + ".join(terms).replace("+ -", "- ") if terms else "0"]
    human += [f"  {_fmt_q(Fraction(c)):>6}  {word_text(w)}" for w, c in items]
    human.append("note: " + payload["merge_policy"])
    _emit(out, payload, args.json, human)
    return EXIT_OK


def _value_text(res: BzvResult) -> str:
    if isinstance(res.value, CoeffPoly):
        return str(res.value)
    v = complex(res.value)
    return repr(v.real) if v.imag == 0 else repr(v)


def cmd_zeta(args, out) -> int:
    cfg = config_from_args(args)
    if cfg.lam not in (-1, 1):
        raise ValueError("zeta needs --lambda -1 (strict) or +1 (weak)")
    F = parse_forest(args.forest)
    Q = cfg.inner_product()
    engine = cfg.engine()
    request = {"command": "zeta", "forest": format_forest_text(F), "route": args.route,
               "renormalise": args.renormalise, "at": args.at, "config": cfg.to_json()}
    cache = Cache(resolve_cache_dir(cfg.cache_dir))
    payload = cache.get(request)
    if payload is None:
        payload = {"forest": request["forest"], "config": cfg.to_json(), "route": args.route}
        if args.at is not None:
            point = parse_point(args.at)
            v = complex(forest_numeric_values(cfg.lam, F, {k: [x] for k, x in point.items()})[0])
            payload["point"] = {str(k): [x.real, x.imag] for k, x in sorted(point.items())}
            payload["value_at"] = [v.real, v.imag]
        if args.renormalise:
            res = renormalised_bzv(cfg.lam, F, Q, engine, args.route)
            payload["result"] = res.to_json()
            payload["value_text"] = _value_text(res)
        elif args.at is None:
            payload["germ"] = _germ_payload(cfg, F, Q, engine, args.route)
        cache.put(request, payload)
    human = [f"forest: {payload['forest']}  lambda={cfg.lam}"]
    if "value_at" in payload:
        re_, im = payload["value_at"]
        human.append(f"germ at {args.at}: {complex(re_, im)}")
    if "result" in payload:
        r = payload["result"]
        human.append(f"renormalised value: {payload['value_text']}  [{r['mode']}]")
        human.append(f"rational: {r['rational']}")
        human += [f"check {k}: {'pass' if v else 'FAIL'}" for k, v in sorted(r["checks"].items())]
        human += [f"note: {d}" for d in r["diagnostics"]]
    if "germ" in payload:
        human.append(f"regularised germ [{payload['germ']['mode']}]: {payload['germ']['text']}")
        if "note" in payload["germ"]:
            human.append(f"note: {payload['germ']['note']}")
    _emit(out, payload, args.json, human)
    failed = "result" in payload and not all(payload["result"]["checks"].values())
    return EXIT_CHECK if failed else EXIT_OK


def _germ_payload(cfg: RunConfig, F, Q, engine: EngineConfig, route: str) -> dict:
    if cfg.mode != "numeric":
        try:
            g = regularised_bzv_germ(cfg.lam, F, route, Q, cfg.K, degree=cfg.degree_bound)
            out = {"mode": "exact", "text": str(g), "json": g.to_json()}
            if any(c.is_unknown_function() for c in g.constants()):
                out["note"] = ("contains unresolved Euler-Maclaurin remainder constants "
                               "(opaque atoms); use --mode numeric for values")
            return out
        except ArithmeticError as exc:
            if cfg.mode == "exact":
                raise
            note = f"exact mode insufficient ({exc}); fitted numerically"
    else:
        note = None
    g = Germ.one()
    for t in as_forest(F):
        g = g * numeric_tree_germ(cfg.lam, t, Q, cfg.degree_bound, engine)[0]
    out = {"mode": "numeric", "text": str(g), "json": g.to_json()}
    if note:
        out["note"] = note
    return out


def cmd_check(args, out) -> int:
    cfg = config_from_args(args)
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names, cfg.seed)
    ok = all(r.passed for r in results)
    payload = {"passed": ok, "checks": [r.to_json() for r in results]}
    human = [f"{'PASS' if r.passed else 'FAIL'}  {r.suite:8} {r.name}"
             + (f"  ({r.detail})" if r.detail else "") for r in results]
    _emit(out, payload, args.json, human)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_cache(args, out) -> int:
    cfg = config_from_args(args)
    cache = Cache(resolve_cache_dir(cfg.cache_dir))
    if args.action == "clear":
        n = cache.clear()
        _emit(out, {"directory": str(cache.directory), "removed": n}, args.json,
              [f"removed {n} entries from {cache.directory}"])
    else:
        entries = cache.entries()
        human = [f"{cache.directory}: {len(entries)} entries"]
        human += [f"  {e['key'][:16]}  {e['size']:>8}  {(e['request'] or {}).get('forest', '')}"
                  for e in entries]
        _emit(out, {"directory": str(cache.directory), "entries": entries}, args.json, human)
    return EXIT_OK


COMMANDS = {"flatten": cmd_flatten, "zeta": cmd_zeta, "check": cmd_check, "cache": cmd_cache}


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except (ValueError, ArithmeticError, LocalityError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
