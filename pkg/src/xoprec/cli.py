"""Command-line entry point: ``xoprec {table,verify,sweep,eval,gram}``.

Exit status: 0 on success, 1 when a mathematical check fails, 2 for usage or
configuration errors, 3-7 for the parameter validation failures (see
:mod:`xoprec.errors`). ``--json`` turns error diagnostics into JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import gmpy2

from . import quadcheck
from .classical import FamilySpec
from .errors import XopError
from .ratpoly import evaluate, parse_scalar, scalar_to_str
from .recurrence import CONVENTIONS, recurrence_2j3, recurrence_4j1, tables_to_csv
from .verify import CHECKS, PAPER_CHECKS, ConfigError, SweepConfig, default_config, sweep, verify
from .xop import CORRECTED, PRINTED, validate, xop_poly

ENV_OUTPUT_DIR = "XOP_OUTPUT_DIR"
ENV_WORKERS = "XOP_WORKERS"

log = logging.getLogger("xoprec")


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=["hermite", "laguerre", "jacobi"])
    p.add_argument("--a", help="first weight parameter, exact rational such as 7/3")
    p.add_argument("--b", help="second Jacobi parameter, exact rational")
    p.add_argument("--type", required=True, choices=["I", "II", "III"], dest="rho")
    p.add_argument("--j", required=True, type=int)
    p.add_argument(
        "--strict",
        action="store_true",
        help="also require a root-free seed and an integrable weight",
    )
    p.add_argument("--pi-variant", choices=[CORRECTED, PRINTED], default=None)


def _add_quad_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--precision", type=int, default=quadcheck.DEFAULT_PRECISION)
    p.add_argument("--order", type=int, default=None, help="fixed order (skip doubling)")
    p.add_argument("--order-start", type=int, default=quadcheck.DEFAULT_ORDER_START)
    p.add_argument("--order-cap", type=int, default=quadcheck.DEFAULT_ORDER_CAP)
    p.add_argument("--tol", default=None, help="convergence threshold, e.g. 1e-20")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xoprec",
        description="Exact recurrence relations for exceptional orthogonal polynomials.",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable diagnostics")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="coefficient tables of the banded recurrence")
    _add_spec_flags(p)
    p.add_argument("--n", required=True, help="degree index or inclusive range lo..hi")
    p.add_argument("--format", choices=["json", "csv", "latex"], default="json")
    p.add_argument("--convention", choices=list(CONVENTIONS), default=None)
    p.add_argument("--kind", choices=["2j+3", "4j+1"], default="2j+3")
    p.add_argument("--output", "-o", default="-", help="file to write (default stdout)")

    p = sub.add_parser("verify", help="run the reproduction checks")
    p.add_argument("--scope", choices=["paper", "all"], default="paper")
    p.add_argument("--skip", action="append", default=[], choices=list(CHECKS) + list(PAPER_CHECKS))
    p.add_argument("--config", help="sweep config supplying the parameter grid")
    p.add_argument("--report", help="write the JSON report here")
    _add_quad_flags(p)

    p = sub.add_parser("sweep", help="run a configured grid and write tables")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output-dir", default=None)

    p = sub.add_parser("eval", help="evaluate an exceptional polynomial")
    _add_spec_flags(p)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--precision", type=int, default=quadcheck.DEFAULT_PRECISION)
    p.add_argument("points", nargs="*", help="p/q for exact values, decimals for BigReal")

    p = sub.add_parser("gram", help="Gram matrix of the weighted inner products")
    _add_spec_flags(p)
    p.add_argument("--nmax", type=int, default=8)
    _add_quad_flags(p)
    return parser


def _spec_from(args):
    a = parse_scalar(args.a) if args.a is not None else None
    b = parse_scalar(args.b) if args.b is not None else None
    fam = FamilySpec.from_params(args.family, a, b)
    kw = {"require_regular": args.strict}
    if args.pi_variant:
        kw["pi_variant"] = args.pi_variant
    return validate(fam, args.rho, args.j, **kw)


def parse_n_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if lo < 0 or hi < lo:
            raise ValueError(f"bad range {text!r}")
        return list(range(lo, hi + 1))
    n = int(text)
    if n < 0:
        raise ValueError("n must be non-negative")
    return [n]


def _emit(text: str, dest: str) -> None:
    if dest == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(dest).write_text(text if text.endswith("\n") else text + "\n")


def cmd_table(args) -> int:
    spec = _spec_from(args)
    ns = parse_n_range(args.n)
    if args.kind == "4j+1":
        tables = [recurrence_4j1(spec, n) for n in ns]
    else:
        tables = [recurrence_2j3(spec, n, args.convention) for n in ns]
    if args.format == "json":
        lines = [t.to_json() for t in tables]
        text = "\n".join(lines)
    elif args.format == "csv":
        text = tables_to_csv(tables)
    else:
        text = "\n\n".join(t.to_latex() for t in tables)
    _emit(text, args.output)
    return 0


def _quad_cfg(cfg: SweepConfig, args) -> SweepConfig:
    data = cfg.to_dict()
    data["quadrature"] = {
        "precision": args.precision,
        "order_start": args.order_start,
        "order_cap": args.order_cap,
    }
    if args.tol:
        data["quadrature"]["tol"] = args.tol
    return SweepConfig.from_dict(data)


def cmd_verify(args) -> int:
    cfg = SweepConfig.load(args.config) if args.config else default_config()
    cfg = _quad_cfg(cfg, args)
    report = verify(args.scope, cfg, skip=args.skip)
    for line in report.summary_lines():
        print(line)
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_dict(), indent=1) + "\n")
    print("PASS" if not report.failed else "FAIL")
    return report.exit_code


def cmd_sweep(args) -> int:
    cfg = SweepConfig.load(args.config)
    workers = args.workers or _env_int(ENV_WORKERS) or cfg.workers
    out_dir = args.output_dir or os.environ.get(ENV_OUTPUT_DIR) or cfg.output_dir
    report, cells = sweep(cfg, workers=workers, output_dir=out_dir)
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    (Path(out_dir) / "report.json").write_text(json.dumps(report.to_dict(), indent=1) + "\n")
    for line in report.summary_lines():
        print(line)
    print(f"tables and report written to {out_dir}")
    return report.exit_code


def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if not raw:
        return None
    try:
        val = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be a positive integer, got {raw!r}") from None
    if val < 1:
        raise ConfigError(f"{name} must be a positive integer, got {raw!r}")
    return val


def parse_point(text: str, precision: int):
    """``p/q`` stays exact; decimal or exponent forms become BigReal."""
    if any(ch in text for ch in ".eE"):
        try:
            return gmpy2.mpfr(text, precision)
        except ValueError:
            raise ValueError(f"cannot parse point {text!r}") from None
    return parse_scalar(text)


def cmd_eval(args) -> int:
    spec = _spec_from(args)
    poly = xop_poly(spec, args.n)
    if getattr(poly, "excluded", False):
        print(f"excluded degree: n={args.n} is not in the degree set of {spec.label()}")
        return 0
    if not args.points:
        print(poly.pretty())
        return 0
    for raw in args.points:
        x = parse_point(raw, args.precision)
        val = evaluate(poly, x)
        shown = scalar_to_str(val) if not isinstance(val, type(gmpy2.mpfr(0))) else format(
            val, f".{quadcheck._digits(args.precision)}g"
        )
        print(f"{raw}\t{shown}")
    return 0


def cmd_gram(args) -> int:
    spec = _spec_from(args)
    report = quadcheck.gram(
        spec,
        args.nmax,
        order=args.order,
        precision=args.precision,
        order_start=args.order_start,
        order_cap=args.order_cap,
        tol=gmpy2.mpfr(args.tol) if args.tol else None,
    )
    print(json.dumps(report.to_dict(), indent=1))
    return 0


COMMANDS = {
    "table": cmd_table,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "eval": cmd_eval,
    "gram": cmd_gram,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except XopError as exc:
        _report_error(args, exc.diagnostic(), str(exc))
        return exc.exit_code
    except ValueError as exc:
        _report_error(args, {"error": type(exc).__name__, "message": str(exc)}, str(exc))
        return 2


def _report_error(args, diag: dict, message: str) -> None:
    if args.json:
        print(json.dumps(diag), file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
