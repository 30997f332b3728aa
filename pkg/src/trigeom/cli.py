"""Batch front door: parse graph documents, dispatch verbs, emit reports.

Every report is a single JSON object with a format version and the full
run configuration echoed, so a printed report can be replayed.  Exit
codes: 0 the property holds / the operation succeeded, 1 a definite
failure with certificate, 2 usage, input, or budget trouble.
"""

import argparse
import json
import sys

from .amalgam import (
    MuPolicy,
    PairOverBase,
    amalgamate,
    check_Kmu,
    chi,
    classify_extension,
    mu_value,
)
from .builder import ample_check, build, geometry_report, verify_Tmu
from .config import Budgets, RunConfig, StrongnessMode
from .errors import TrigeomError
from .generate import census
from .graph import parse_graph
from .predim import closure, delta, is_strong

REPORT_VERSION = 1


def _doc_default(x):
    if hasattr(x, "to_doc"):
        return x.to_doc()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"not reportable: {type(x).__name__}")


def _ids(text: str) -> frozenset[int]:
    if not text:
        return frozenset()
    try:
        return frozenset(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ids: {text!r}")


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="trigeom")
    top.add_argument("--jobs", type=int, default=1)
    top.add_argument("--budget", action="append", default=[],
                     metavar="CAP=VALUE", help="override one budget cap")
    top.add_argument("--policy", metavar="FILE",
                     help="JSON file of mu overrides keyed by pair code")
    top.add_argument("--mode", choices=[m.value for m in StrongnessMode],
                     default=StrongnessMode.LCLOSED.value)
    top.add_argument("--dual6b", action="store_true")
    top.add_argument("--allow-small-n", action="store_true")
    top.add_argument("--out", metavar="FILE", help="also write the report here")
    sub = top.add_subparsers(dest="verb", required=True)

    def graph_verb(name, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("graph", help="graph document file, or - for stdin")
        return p

    graph_verb("check", help="K_mu membership with certificate")
    p = graph_verb("delta", help="predimension of a vertex set")
    p.add_argument("--set", type=_ids, default=None, dest="subset")
    p = graph_verb("strong", help="is A strong in B (default: everything)")
    p.add_argument("--a", type=_ids, required=True)
    p.add_argument("--b", type=_ids, default=None)
    p = graph_verb("closure", help="self-sufficient closure of A")
    p.add_argument("--a", type=_ids, required=True)
    p = graph_verb("pairs", help="classify the extension (A, B)")
    p.add_argument("--a", type=_ids, required=True)
    p.add_argument("--b", type=_ids, required=True)
    p = graph_verb("chi", help="copy packing number and mu cap of a pair")
    p.add_argument("--a", type=_ids, required=True)
    p.add_argument("--b", type=_ids, required=True)

    p = sub.add_parser("amalgamate", help="strong amalgam of C1, C2 over C0")
    p.add_argument("c0")
    p.add_argument("c1")
    p.add_argument("c2")

    p = sub.add_parser("build", help="grow a generic approximation")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--max-ext", type=int, default=4)
    p.add_argument("--max-base", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)

    p = graph_verb("verify", help="finite-scale axiom report")
    p.add_argument("--max-ext", type=int, default=2)
    p.add_argument("--max-base", type=int, default=2)
    p.add_argument("--suite", choices=["tmu", "lemmas", "ample"], default="tmu")
    p.add_argument("--flag", type=_ids, default=frozenset({0, 1, 2}),
                   help="flag ids for the ample suite")
    p.add_argument("--seed", type=int, default=0)

    p = graph_verb("ample", help="2-ample condition groups on a flag")
    p.add_argument("--flag", type=_ids, required=True,
                   help="point,line,plane ids")

    p = sub.add_parser("census", help="exhaustive class counts by size")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--size", type=int, default=4)

    return top


def _read_graph(path: str, allow_small_n: bool):
    text = sys.stdin.read() if path == "-" else open(path).read()
    return parse_graph(text, allow_small_n=allow_small_n)


def _budgets(pairs: list[str]) -> Budgets:
    b = Budgets.from_env()
    fields = vars(b)
    overrides = {}
    for item in pairs:
        key, _, value = item.partition("=")
        if key not in fields or not value:
            raise TrigeomError(f"unknown budget override {item!r}")
        overrides[key] = int(value)
    return Budgets(**{**fields, **overrides}) if overrides else b


def _policy(path: str | None) -> MuPolicy:
    if not path:
        return MuPolicy()
    doc = json.load(open(path))
    if not isinstance(doc, dict):
        raise TrigeomError("policy file must map pair codes to integers")
    return MuPolicy(overrides={k: int(v) for k, v in doc.items()})


def dispatch(argv: list[str]) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as stop:
        return 0 if stop.code == 0 else 2
    try:
        budgets = _budgets(args.budget)
        policy = _policy(args.policy)
        mode = StrongnessMode(args.mode)
        config = RunConfig(
            n=getattr(args, "n", 6),
            mode=mode,
            dual6b=args.dual6b,
            budgets=budgets,
            seed=getattr(args, "seed", 0),
            jobs=args.jobs,
        )
        code, body = _run(args, config, policy, budgets, mode)
    except TrigeomError as err:
        print(json.dumps({
            "format_version": REPORT_VERSION,
            "error": type(err).__name__,
            "message": str(err),
        }, indent=2))
        return 2
    except OSError as err:
        print(json.dumps({
            "format_version": REPORT_VERSION,
            "error": "io",
            "message": str(err),
        }, indent=2))
        return 2
    report = {
        "format_version": REPORT_VERSION,
        "verb": args.verb,
        "config": config.header(),
        "result": body,
    }
    text = json.dumps(report, sort_keys=True, indent=2, default=_doc_default)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return code


def _run(args, config, policy, budgets, mode):
    verb = args.verb

    if verb == "build":
        state = build(
            n=args.n,
            steps=args.steps,
            max_ext=args.max_ext,
            max_base=args.max_base,
            seed=args.seed,
            policy=policy,
            budgets=budgets,
            dual6b=args.dual6b,
        )
        return 0, state.to_doc()

    if verb == "census":
        rows = census(args.size, args.n, policy, budgets, args.dual6b)
        return 0, {"rows": rows}

    if verb == "amalgamate":
        c0 = _read_graph(args.c0, args.allow_small_n)
        c1 = _read_graph(args.c1, args.allow_small_n)
        c2 = _read_graph(args.c2, args.allow_small_n)
        res = amalgamate(c0, c1, c2, policy, budgets, args.dual6b)
        return 0, {
            "graph": res.d.to_doc(),
            "embed2": {str(k): v for k, v in res.embed2.as_dict.items()},
            "path": list(res.path),
        }

    g = _read_graph(args.graph, args.allow_small_n)

    if verb == "check":
        v = check_Kmu(g, policy, budgets, args.dual6b)
        return (0 if v.holds else 1), v.to_doc()

    if verb == "delta":
        subset = args.subset if args.subset is not None else frozenset(g.ids)
        value = delta(g, subset)
        print(value)
        return 0, {"delta": value, "set": sorted(subset)}

    if verb == "strong":
        b = args.b if args.b is not None else frozenset(g.ids)
        v = is_strong(g, args.a, b, mode, budgets)
        return (0 if v.holds else 1), v.to_doc()

    if verb == "closure":
        c = closure(g, args.a, mode, budgets)
        return 0, {"closure": sorted(c), "delta": delta(g, c)}

    if verb == "pairs":
        cls = classify_extension(g, args.a, args.b, budgets)
        return 0, cls

    if verb == "chi":
        pair = PairOverBase(g, args.a, args.b)
        mu = mu_value(policy, pair, budgets)
        value = chi(g, pair, budgets)
        return (0 if value <= mu else 1), {"chi": value, "mu": mu}

    if verb == "verify":
        if args.suite == "ample":
            return _run_ample(g, args.flag, budgets)
        if args.suite == "lemmas":
            return _run_lemma_suite(g.n, args.seed, budgets)
        report = verify_Tmu(g, args.max_ext, args.max_base, policy, budgets,
                            args.dual6b)
        geo = geometry_report(g, budgets)
        holds = report["axiom1"]["holds"] and geo.holds_universal
        return (0 if holds else 1), {"axioms": report, "geometry": geo.to_doc()}

    if verb == "ample":
        return _run_ample(g, args.flag, budgets)

    raise TrigeomError(f"unknown verb {verb!r}")  # unreachable via argparse


def _run_ample(g, flag_ids, budgets):
    flag = sorted(flag_ids)
    if len(flag) != 3:
        raise TrigeomError("--flag needs exactly three ids")
    by_sort = {g.sort_of(v).value: v for v in flag}
    if len(by_sort) != 3:
        raise TrigeomError("--flag needs one id of each sort")
    rep = ample_check(g, by_sort["point"], by_sort["line"], by_sort["plane"],
                      budgets)
    return (0 if rep.holds else 1), rep.to_doc()


def _run_lemma_suite(n, seed, budgets):
    """Seeded randomized checks of the exact calculus identities."""
    import random

    from .generate import random_free_instance, random_residue_instance
    from .predim import delta1, delta_rel

    rng = random.Random(seed)
    out = {"residue_identity": 0, "free_additivity": 0, "failures": []}
    for _ in range(100):
        g, x, a = random_residue_instance(rng, n=n)
        if delta_rel(g, a, {x}) == delta1(g, a):
            out["residue_identity"] += 1
        else:
            out["failures"].append({"lemma": "residue_identity",
                                    "graph": g.to_doc()})
    for _ in range(40):
        d, a, b, c = random_free_instance(rng, n=n, budgets=budgets)
        if delta(d, d.ids) == delta(b, b.ids) + delta(c, c.ids) - delta(b, a):
            out["free_additivity"] += 1
        else:
            out["failures"].append({"lemma": "free_additivity",
                                    "graph": d.to_doc()})
    return (0 if not out["failures"] else 1), out


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
