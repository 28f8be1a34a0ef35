"""Command-line front end: construct, verify, reconstruct, search, gauss.

A thin shell over the library: every subcommand parses flags, calls one
module operation, and serializes the result.  No numerical logic lives
here.  Machine-readable output goes to files or stdout; all diagnostics go
to stderr.  Exit codes: 0 success or verification pass, 1 verification
failure or non-convergence, 2 usage or IO error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

from . import __version__
from .construct import build_family
from .gauss import GaussSumParams, gauss_sum
from .io import FamilyDocument, load_family, report_payload, save_family, write_json
from .reconstruct import reconstruct_all
from .search import SearchConfig, polish, run_search
from .verify import verify_family

__all__ = ["cli_dispatch", "main"]


def _emit(payload: dict, out_path) -> None:
    if out_path:
        write_json(payload, out_path)
    else:
        json.dump(payload, sys.stdout, indent=1)
        sys.stdout.write("\n")


def _metadata(generator: str, **extra) -> dict:
    meta = {
        "generator": generator,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    meta.update(extra)
    return meta


def _cmd_construct(args) -> int:
    try:
        family = build_family(args.d)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    doc = FamilyDocument.from_family(family, metadata=_metadata("construct", dimension=args.d))
    _emit(doc.to_payload(), args.out)
    print(verify_family(family).summary(), file=sys.stderr)
    return 0


def _cmd_verify(args) -> int:
    try:
        family = load_family(args.family)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = verify_family(family, tolerance=args.tol, keep_gram=args.full_gram)
    if args.report:
        payload = report_payload(report, __version__, source_path=args.family)
        try:
            write_json(payload, args.report)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    print(report.summary(), file=sys.stderr)
    return 0 if report.passed else 1


def _cmd_reconstruct(args) -> int:
    try:
        family = load_family(args.family)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        states = reconstruct_all(family, tol=args.tol)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    doc = FamilyDocument.from_family(
        family, states=states, metadata=_metadata("reconstruct", source=args.family)
    )
    try:
        _emit(doc.to_payload(), args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"reconstructed {family.num_bases * family.dim} states "
        f"(d={family.dim}, bases={family.num_bases})",
        file=sys.stderr,
    )
    return 0


def _cmd_search(args) -> int:
    try:
        cfg = SearchConfig(
            dim=args.d,
            num_bases=args.bases,
            restarts=args.restarts,
            max_iterations=args.iters,
            seed=args.seed,
            target_residual=args.target,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if getattr(args, "from_family", None):
        try:
            start = load_family(args.from_family)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        try:
            result = polish(start, cfg)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    else:
        result = run_search(cfg)

    meta = _metadata(
        "search",
        seed=cfg.seed,
        dimension=cfg.dim,
        num_bases=cfg.num_bases,
        best_objective=result.best_objective,
        converged=result.converged,
    )
    doc = FamilyDocument.from_family(result.best_family, metadata=meta)
    try:
        _emit(doc.to_payload(), args.out)
        if args.log:
            write_json(
                {
                    "tool_version": __version__,
                    "config": {
                        "dim": cfg.dim,
                        "num_bases": cfg.num_bases,
                        "restarts": cfg.restarts,
                        "max_iterations": cfg.max_iterations,
                        "seed": cfg.seed,
                        "target_residual": cfg.target_residual,
                    },
                    "best_objective": result.best_objective,
                    "converged": result.converged,
                    "iterations_used": result.iterations_used,
                    "restarts_used": result.restarts_used,
                    "restart_objectives": list(result.history),
                    "restart_iterations": list(result.restart_iterations),
                },
                args.log,
            )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    status = "converged" if result.converged else "residual floor reached"
    print(
        f"{status}: best objective {result.best_objective:.3e} after "
        f"{result.restarts_used} restart(s), {result.iterations_used} iteration(s)",
        file=sys.stderr,
    )
    return 0 if result.converged else 1


def _cmd_gauss(args) -> int:
    try:
        params = GaussSumParams(u=args.u, v=args.v, w=args.w)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    value = gauss_sum(params)
    print(f"S({params.u}, {params.v}, {params.w}) = {value.real!r} + {value.imag!r}j")
    print(f"|S|^2 = {abs(value) ** 2!r}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mubkit",
        description="Construct, verify, reconstruct, and search for mutually unbiased bases.",
    )
    parser.add_argument("--version", action="version", version=f"mubkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_construct = sub.add_parser(
        "construct", help="build the closed-form complete family for prime d"
    )
    p_construct.add_argument("--d", type=int, required=True, help="dimension (prime)")
    p_construct.add_argument("--out", default=None, help="output family JSON path")
    p_construct.set_defaults(func=_cmd_construct)

    p_verify = sub.add_parser("verify", help="check a family document against the overlap targets")
    p_verify.add_argument("family", help="family JSON path")
    p_verify.add_argument("--tol", type=float, default=1e-10, help="residual tolerance")
    p_verify.add_argument("--report", default=None, help="write a certificate JSON here")
    p_verify.add_argument(
        "--full-gram", action="store_true", help="include the full Gram matrix in the report"
    )
    p_verify.set_defaults(func=_cmd_verify)

    p_reconstruct = sub.add_parser(
        "reconstruct", help="extract state vectors from a family's projectors"
    )
    p_reconstruct.add_argument("family", help="family JSON path")
    p_reconstruct.add_argument("--out", default=None, help="output JSON path (family + states)")
    p_reconstruct.add_argument("--tol", type=float, default=1e-10, help="rank-1 tolerance")
    p_reconstruct.set_defaults(func=_cmd_reconstruct)

    p_search = sub.add_parser("search", help="numerically search for unbiased bases")
    p_search.add_argument("--d", type=int, required=True, help="dimension")
    p_search.add_argument("--bases", type=int, required=True, help="number of bases")
    p_search.add_argument("--restarts", type=int, default=20)
    p_search.add_argument("--iters", type=int, default=50000, help="max iterations per restart")
    p_search.add_argument("--seed", type=int, default=0)
    p_search.add_argument("--target", type=float, default=1e-16, help="objective target")
    p_search.add_argument("--out", default=None, help="output family JSON path")
    p_search.add_argument("--log", default=None, help="per-restart log JSON path")
    p_search.add_argument(
        "--from",
        dest="from_family",
        default=None,
        metavar="FAMILY",
        help="refine this family instead of random restarts",
    )
    p_search.set_defaults(func=_cmd_search)

    p_gauss = sub.add_parser("gauss", help="evaluate a quadratic exponential sum")
    p_gauss.add_argument("--u", type=int, required=True)
    p_gauss.add_argument("--v", type=int, required=True)
    p_gauss.add_argument("--w", type=int, required=True)
    p_gauss.set_defaults(func=_cmd_gauss)

    return parser


def cli_dispatch(argv=None) -> int:
    """Parse arguments and run one subcommand; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help/--version.
        return int(exc.code or 0)
    return args.func(args)


def main() -> None:
    sys.exit(cli_dispatch())
