"""Command-line entry point: ``mergedist <subcommand> ...``.

Every subcommand prints a short human-readable result on stdout.  With
``--out`` it also writes a JSON report holding the tool version, the run
configuration and a certificate sufficient to re-check the number offline.
Exit status: 0 ok, 1 invariant or fuzz failure, 2 input error, 3 scale guard.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import InvalidTreeError, MergeDistError, ScaleGuardError
from .filtration import geometric_lift, lp_function_distance, sublevel_merge_forest
from .formats import (
    FormatError,
    dumps,
    forest_to_dict,
    load_complex,
    load_presentation,
    load_tree,
    read_json,
    tree_from_dict,
)
from .fuzz import MUTANTS, run_fuzz
from .metrics.barcodes import Barcode, elder_barcode
from .metrics.cophenetic import optimal_labeling
from .metrics.interleaving import check_witness, optimal_interleaving
from .metrics.presentation_distance import DEFAULT_BUDGET, presentation_distance_bracket
from .metrics.wasserstein import wasserstein
from .norms import INF, parse_p
from .presentation import label_distance
from .trees import validate

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SCALE = 0, 1, 2, 3


def _p_arg(text: str) -> float:
    try:
        return parse_p(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _nonnegative(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=_p_arg, default=1.0, help='exponent p >= 1, or "inf"')
    common.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    common.add_argument("--pivot", action="append", default=[], metavar="PATH")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--out", metavar="PATH")

    ap = argparse.ArgumentParser(prog="mergedist", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"mergedist {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check tree files")
    s.add_argument("trees", nargs="+")
    s = sub.add_parser("barcode", parents=[common], help="elder-rule barcode of a tree")
    s.add_argument("tree")
    s = sub.add_parser("wasserstein", parents=[common], help="p-Wasserstein distance of barcodes")
    s.add_argument("a", help="barcode or tree file")
    s.add_argument("b", help="barcode or tree file")
    s = sub.add_parser("cophenetic", parents=[common], help="p-cophenetic distance")
    s.add_argument("m")
    s.add_argument("n")
    s.add_argument("--kmax", type=_positive, default=None)
    s = sub.add_parser("interleaving", parents=[common], help="interleaving distance with witness")
    s.add_argument("m")
    s.add_argument("n")
    s = sub.add_parser("presentation", parents=[common], help="bracket on the presentation distance")
    s.add_argument("m")
    s.add_argument("n")
    s = sub.add_parser("lift", parents=[common], help="complex and functions realizing two presentations")
    s.add_argument("pm")
    s.add_argument("pn")
    s = sub.add_parser("filtrate", parents=[common], help="sublevel merge forests of a complex")
    s.add_argument("complex")
    s.add_argument("--function", default=None, help="name of one function in the document")
    s = sub.add_parser("fuzz", parents=[common], help="randomized invariant checks")
    s.add_argument("--trials", type=_nonnegative, default=500)
    s.add_argument("--mutant", choices=MUTANTS, default=None)
    s.add_argument("--repro-dir", default=None, help="where reproducers go (default: next to --out)")
    return ap


_INPUTS = ("trees", "tree", "a", "b", "m", "n", "pm", "pn", "complex")
_COMMON = {"command", "p", "budget", "pivot", "seed", "tolerance", "out"}


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's output, as embedded in its report."""

    subcommand: str
    inputs: tuple[str, ...] = ()
    p: float = 1.0
    budget: int = DEFAULT_BUDGET
    pivots: tuple[str, ...] = ()
    seed: int = 0
    tolerance: float = 1e-9
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        parse_p(self.p)
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if not self.tolerance >= 0:
            raise ValueError("tolerance must be non-negative")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        ns = vars(args)
        inputs = []
        for k in _INPUTS:
            v = ns.get(k)
            if v is not None:
                inputs.extend(v if isinstance(v, list) else [v])
        extra = {k: v for k, v in ns.items() if k not in _COMMON and k not in _INPUTS}
        return cls(
            args.command, tuple(inputs), args.p, args.budget, tuple(args.pivot),
            args.seed, args.tolerance, dict(sorted(extra.items())),
        )

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "inputs": list(self.inputs),
            "p": "inf" if self.p == INF else self.p,
            "budget": self.budget,
            "pivots": list(self.pivots),
            "seed": self.seed,
            "tolerance": self.tolerance,
            "options": self.options,
        }


def _report(args, result: dict, certificate) -> dict:
    return {
        "tool": "mergedist",
        "version": __version__,
        "config": RunConfig.from_args(args).to_dict(),
        "result": result,
        "certificate": certificate,
    }


def _fmt(x: float) -> str:
    return "inf" if x == INF else repr(float(x))


def _barcode_or_tree(path) -> Barcode:
    d = read_json(path)
    if isinstance(d, dict) and "nodes" in d:
        return elder_barcode(tree_from_dict(d))
    try:
        return Barcode.from_dict(d)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"{path}: neither a tree nor a barcode document: {e}") from None


def cmd_validate(args):
    results, bad = {}, False
    for path in args.trees:
        problems = validate(load_tree(path))
        results[path] = problems
        bad |= bool(problems)
        print(f"{path}: " + ("ok" if not problems else "; ".join(problems)))
    return (EXIT_INPUT if bad else EXIT_OK), _report(args, {"valid": not bad}, results)


def cmd_barcode(args):
    B = elder_barcode(load_tree(args.tree))
    print(f"{len(B)} bars")
    return EXIT_OK, _report(args, {"bars": len(B)}, B.to_dict())


def cmd_wasserstein(args):
    B, C = _barcode_or_tree(args.a), _barcode_or_tree(args.b)
    value, matching = wasserstein(B, C, args.p)
    print(_fmt(value))
    cert = {"B": B.to_dict(), "C": C.to_dict(), "matching": matching.to_dict()}
    return EXIT_OK, _report(args, {"value": value}, cert)


def cmd_cophenetic(args):
    M, N = load_tree(args.m), load_tree(args.n)
    value, labeling = optimal_labeling(M, N, args.p, args.kmax)
    print(_fmt(value))
    cert = {"k_max": args.kmax, "labeling": [list(pair) for pair in labeling]}
    return EXIT_OK, _report(args, {"value": value}, cert)


def cmd_interleaving(args):
    M, N = load_tree(args.m), load_tree(args.n)
    w = optimal_interleaving(M, N, tol=args.tolerance)
    errs = check_witness(w, args.tolerance)
    print(_fmt(w.epsilon))
    for e in errs:
        print(f"witness check: {e}", file=sys.stderr)
    result = {"value": w.epsilon, "witness_verified": not errs}
    return (EXIT_FAIL if errs else EXIT_OK), _report(args, result, w.to_dict())


def cmd_presentation(args):
    M, N = load_tree(args.m), load_tree(args.n)
    pivots = [load_tree(p) for p in args.pivot]
    br = presentation_distance_bracket(M, N, args.p, pivots, args.budget)
    print(f"lower {_fmt(br.lower)} upper {_fmt(br.upper)}")
    d = br.to_dict()
    result = {"lower": d.pop("lower"), "upper": d.pop("upper")}
    return EXIT_OK, _report(args, result, d)


def cmd_lift(args):
    pm, pn = load_presentation(args.pm), load_presentation(args.pn)
    X, f, g = geometric_lift(pm, pn)
    value = lp_function_distance(f, g, args.p)
    print(f"{X.vertex_count} vertices, {len(X.edges)} edges, distance {_fmt(value)}")
    cert = {"complex": X.to_dict(), "f": f.to_dict(), "g": g.to_dict()}
    result = {"function_distance": value, "label_distance": label_distance(pm, pn, args.p)}
    return EXIT_OK, _report(args, result, cert)


def cmd_filtrate(args):
    X, fns = load_complex(args.complex, args.function)
    out = {}
    for name, fn in sorted(fns.items()):
        forest = sublevel_merge_forest(X, fn)
        out[name] = forest_to_dict(forest)
        print(f"{name}: {len(forest)} tree(s)")
    return EXIT_OK, _report(args, {"functions": sorted(fns)}, out)


def cmd_fuzz(args):
    repro = args.repro_dir
    if repro is None and args.out:
        repro = str(Path(args.out).parent / "reproducers")
    if args.trials == 0:
        print("warning: zero trials, nothing checked", file=sys.stderr)
    rep = run_fuzz(args.trials, args.seed, repro, args.mutant)
    if rep.passed:
        print(f"pass: {args.trials} trials, seed {args.seed}")
    else:
        print(f"FAIL: {len(rep.failures)} invariant violation(s)")
        for f in rep.failures:
            where = f.get("reproducer", "(no --out/--repro-dir given)")
            print(f"  trial {f['trial']} {f['invariant']}: {f['message']} -> {where}")
    d = rep.to_dict()
    return (EXIT_OK if rep.passed else EXIT_FAIL), _report(args, {"passed": rep.passed}, d)


COMMANDS = {
    "validate": cmd_validate,
    "barcode": cmd_barcode,
    "wasserstein": cmd_wasserstein,
    "cophenetic": cmd_cophenetic,
    "interleaving": cmd_interleaving,
    "presentation": cmd_presentation,
    "lift": cmd_lift,
    "filtrate": cmd_filtrate,
    "fuzz": cmd_fuzz,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    logging.getLogger("mergedist.fuzz").setLevel(logging.CRITICAL)
    args = build_parser().parse_args(argv)
    try:
        code, report = COMMANDS[args.command](args)
    except ScaleGuardError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCALE
    except (FormatError, InvalidTreeError, MergeDistError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        Path(args.out).write_text(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
