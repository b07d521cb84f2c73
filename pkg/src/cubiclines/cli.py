"""Command-line entry point: every headline verification as a subcommand.

Each invocation runs one experiment, prints one JSON report embedding
the verbatim subcommand and the exact numeric configuration, and exits
0 when the expectation verified, 2 when the run completed but the
expectation failed, and 1 on usage or I/O problems.  Identical
invocations produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .config import DEFAULT_CONFIG, ExperimentConfig
from .errors import CubicLinesError
from . import experiments
from .fermat import fermat_form
from .geometry import (
    line_type,
    residual_line,
    tangent_planes_pencil,
    tangent_spans,
)
from .lines import Line, Plane
from .multipoly import MultiPoly

USAGE_ERROR = 1
MISMATCH = 2


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report to this file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--tol-newton", type=float, default=None)
    common.add_argument("--tol-residual", type=float, default=None)
    common.add_argument("--tol-dedup", type=float, default=None)
    common.add_argument("--cap-loops", type=int, default=None)

    parser = argparse.ArgumentParser(
        prog="cubiclines",
        description="verified line geometry on cubic hypersurfaces",
    )
    top = parser.add_subparsers(dest="family", required=True)

    fermat4 = top.add_parser("fermat4", help="fourfold second-type experiments")
    f4 = fermat4.add_subparsers(dest="command", required=True)
    f4.add_parser("components", parents=[common])
    f4.add_parser("degrees", parents=[common])
    f4.add_parser("count360", parents=[common])
    contraction = f4.add_parser("contraction", parents=[common])
    contraction.add_argument("--i", type=int, default=None)
    contraction.add_argument("--j", type=int, default=None)
    contraction.add_argument("--mu", type=int, default=None)
    f4.add_parser("inclusion", parents=[common])
    f4.add_parser("two-point", parents=[common])
    f4.add_parser("three-point", parents=[common])

    fermat3 = top.add_parser("fermat3", help="threefold second-type experiments")
    f3 = fermat3.add_subparsers(dest="command", required=True)
    f3.add_parser("cones", parents=[common])
    f3.add_parser("birational-spotcheck", parents=[common])

    x0 = top.add_parser("x0", help="marked degenerations")
    x0sub = x0.add_subparsers(dest="command", required=True)
    build = x0sub.add_parser("build", parents=[common])
    build.add_argument("--nodes", type=int, choices=(0, 1, 2), required=True)

    mono = top.add_parser("mono", help="numerical monodromy groups")
    msub = mono.add_subparsers(dest="command", required=True)
    for kind in ("six-lines", "cl", "cl2"):
        sub = msub.add_parser(kind, parents=[common])
        sub.add_argument("--cap", type=int, default=200)

    line = top.add_parser("line", help="single-line queries")
    lsub = line.add_subparsers(dest="command", required=True)
    for kind in ("type", "tangents", "residual"):
        sub = lsub.add_parser(kind, parents=[common])
        sub.add_argument("--cubic", help="JSON file with the cubic form")
        sub.add_argument("--fermat", type=int, choices=(3, 4), default=None)
        sub.add_argument("--line", required=True, help="JSON file with the line")
        if kind == "residual":
            sub.add_argument("--plane", required=True, help="JSON file with the plane")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {}
    if args.tol_newton is not None:
        overrides["tol_newton"] = args.tol_newton
    if args.tol_residual is not None:
        overrides["tol_residual"] = args.tol_residual
    if args.tol_dedup is not None:
        overrides["tol_dedup"] = args.tol_dedup
    if args.cap_loops is not None:
        overrides["cap_loops"] = args.cap_loops
    return DEFAULT_CONFIG.with_overrides(**overrides)


def _load_json(path: str) -> dict:
    with open(path, "r") as handle:
        return json.load(handle)


def _load_cubic(args: argparse.Namespace) -> MultiPoly:
    if args.fermat is not None:
        return fermat_form(args.fermat)
    if not args.cubic:
        raise IOError("provide --cubic <file> or --fermat 3|4")
    return MultiPoly.from_json(_load_json(args.cubic))


def _run_line_query(args: argparse.Namespace) -> dict:
    f = _load_cubic(args)
    ln = Line.from_json(_load_json(args.line))
    if args.command == "type":
        kind = line_type(f, ln)
        return {"type": kind.value, "passed": True}
    if args.command == "tangents":
        span = tangent_spans(f, ln)
        pencil = tangent_planes_pencil(f, ln)
        return {
            "quotient_dim": span.quotient_dim,
            "pencil": [p.to_json() for p in pencil],
            "passed": True,
        }
    plane = Plane.from_json(_load_json(args.plane))
    res = residual_line(f, ln, plane)
    return {"kind": res.kind, "line": res.line.to_json(), "passed": True}


def _run_command(args: argparse.Namespace, cfg: ExperimentConfig) -> dict:
    samples = args.samples
    if args.family == "fermat4":
        if args.command == "components":
            return experiments.component_census(
                samples=samples or 100, seed=args.seed
            )
        if args.command == "degrees":
            return experiments.degree_totals()
        if args.command == "count360":
            return experiments.count360_experiment(seed=args.seed, cfg=cfg)
        if args.command == "contraction":
            return experiments.contraction_experiment(
                samples=samples or 50,
                seed=args.seed,
                i=args.i,
                j=args.j,
                mu=args.mu,
            )
        if args.command == "inclusion":
            return experiments.inclusion_experiment(seed=args.seed, cfg=cfg)
        if args.command == "two-point":
            return experiments.two_point_experiment(
                samples=samples or 50, seed=args.seed, cfg=cfg
            )
        if args.command == "three-point":
            return experiments.three_point_experiment(
                samples=samples or 50, seed=args.seed
            )
    if args.family == "fermat3":
        if args.command == "cones":
            return experiments.threefold_cone_census(
                samples=samples or 10, seed=args.seed
            )
        if args.command == "birational-spotcheck":
            return experiments.birational_spotcheck(
                samples=samples or 20, seed=args.seed, cfg=cfg
            )
    if args.family == "x0":
        return experiments.x0_experiment(args.nodes, cfg=cfg)
    if args.family == "mono":
        return experiments.monodromy_experiment(
            args.command, seed=args.seed, cap=args.cap, cfg=cfg
        )
    return _run_line_query(args)


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as handle:
            handle.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code else 0
    cfg = _config_from_args(args)
    subcommand = args.family + (" " + args.command if args.command else "")
    recorded = []
    skip = False
    for token in argv:
        if skip:
            skip = False
            continue
        if token == "--out":
            skip = True
            continue
        if token.startswith("--out="):
            continue
        recorded.append(token)
    envelope = {
        "subcommand": subcommand,
        "argv": recorded,
        "config": cfg.to_json(),
        "seed": args.seed,
    }
    try:
        result = _run_command(args, cfg)
    except (IOError, OSError, json.JSONDecodeError, ValueError) as exc:
        envelope["error"] = str(exc)
        _emit(envelope, args.out)
        return USAGE_ERROR
    except CubicLinesError as exc:
        envelope["error"] = "%s: %s" % (type(exc).__name__, exc)
        envelope["passed"] = False
        _emit(envelope, args.out)
        return MISMATCH
    envelope["result"] = result
    envelope["passed"] = bool(result.get("passed", True))
    try:
        _emit(envelope, args.out)
    except (IOError, OSError) as exc:
        sys.stderr.write("cannot write report: %s\n" % exc)
        return USAGE_ERROR
    return 0 if envelope["passed"] else MISMATCH


if __name__ == "__main__":
    sys.exit(main())
