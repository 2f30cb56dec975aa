"""Command-line front end.

Data goes to stdout (or ``--out``), diagnostics to stderr.  Exit codes:
0 success, 1 usage error, 2 computation or convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from .contraction import spectral_convergence
from .core import ModelParams, RabiParams, Spin, assemble_dense, build_hl_blocks
from .errors import SolverError, UnsupportedSpin
from .oracle import eig_dense_symmetric
from .spectra import hl_spectrum, rabi_spectrum
from .transfer import eig_block
from .validation import format_report, run_suites

SCHEMA_VERSION = 1
# below this the finite models already reproduce the Rabi levels to rounding
CONVERGED_FLOOR = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _l_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("every l must be a positive integer")
    return values


def _spin(text: str) -> Spin:
    try:
        return Spin.of(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def render_record(params: dict, values, parities, meta: dict, fmt: str) -> str:
    """Serialise one spectrum as CSV (``index,parity,value``) or JSON."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "parity", "value"])
        for i, (v, p) in enumerate(zip(values, parities)):
            w.writerow([i, p or "", _fmt(v)])
        return buf.getvalue()
    record = {
        "schema_version": SCHEMA_VERSION,
        "params": params,
        "eigenvalues": [
            {"index": i, "parity": p, "value": float(v)}
            for i, (v, p) in enumerate(zip(values, parities))
        ],
        "meta": meta,
    }
    return json.dumps(record, indent=2) + "\n"


def cmd_spectrum_hl(args) -> int:
    if args.r.twice_j != 1:
        raise UsageError("only r = 1/2 is supported")
    p = ModelParams(args.omega, args.delta, args.g, args.l, args.r)
    start = time.perf_counter()
    if args.solver == "hl-cf":
        if not p.l.is_integer:
            raise UsageError("the hl-cf solver needs integer l; use --solver block-transfer or oracle")
        res = hl_spectrum(p, args.tol)
        values, parities = res.values, [q.symbol for q in res.parities]
    elif args.solver == "block-transfer":
        res = eig_block(build_hl_blocks(p), args.tol)
        if res.fallback:
            print("warning: transfer scan missed roots; dense oracle used", file=sys.stderr)
        values, parities = res.eigenvalues, [None] * res.eigenvalues.size
    else:
        values = eig_dense_symmetric(assemble_dense(build_hl_blocks(p)))
        parities = [None] * values.size
    elapsed = (time.perf_counter() - start) * 1e3
    params = {"model": "hl", "omega": p.omega, "delta": p.delta, "g": p.g, "l": str(p.l), "r": str(p.r)}
    meta = {
        "solver": args.solver,
        "tol": args.tol,
        "truncation_k": None,
        "wall_time_ms": round(elapsed, 3) if args.timing else None,
    }
    _write(render_record(params, values, parities, meta, args.format), args.out)
    return 0


def cmd_spectrum_rabi(args) -> int:
    p = RabiParams(args.omega, args.delta, args.g, args.levels, args.tol)
    start = time.perf_counter()
    res = rabi_spectrum(p)
    elapsed = (time.perf_counter() - start) * 1e3
    params = {"model": "rabi", "omega": p.omega, "delta": p.delta, "g": p.g, "levels": p.levels}
    meta = {
        "solver": "rabi-cf",
        "tol": p.tol,
        "truncation_k": res.meta.truncation_k,
        "wall_time_ms": round(elapsed, 3) if args.timing else None,
    }
    parities = [q.symbol for q in res.parities]
    _write(render_record(params, res.values, parities, meta, args.format), args.out)
    return 0


def cmd_converge(args) -> int:
    if len(set(args.l_list)) < 2:
        raise UsageError("--l-list needs at least two distinct values for a verdict")
    rp = RabiParams(args.omega, args.delta, args.g, args.levels)
    try:
        table = spectral_convergence(rp, args.l_list)
    except ValueError as exc:
        raise UsageError(str(exc))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["l", "g_l", "shift", "level", "abs_err"])
    for row in table.rows:
        for level, err in enumerate(row.per_level_errors):
            w.writerow([row.l, _fmt(row.g_l), _fmt(row.shift), level, _fmt(err)])
        w.writerow([row.l, _fmt(row.g_l), _fmt(row.shift), "max", _fmt(row.max_err)])
    _write(buf.getvalue(), args.out)
    first, last = table.rows[0].max_err, table.rows[-1].max_err
    if last < first or last <= CONVERGED_FLOOR:
        return 0
    print(f"convergence check failed: max_err {last:.3e} at l={table.rows[-1].l} "
          f"is not below {first:.3e} at l={table.rows[0].l}", file=sys.stderr)
    return 2


def cmd_validate(args) -> int:
    checks = run_suites(args.suite, args.seed)
    _write(format_report(checks), args.out)
    return 0 if all(c.passed for c in checks) else 2


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rabicf", description="Continued-fraction spectra of the (generalized) Rabi model.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def physics(p, levels: bool):
        p.add_argument("--omega", type=_positive_float, required=True)
        p.add_argument("--delta", type=float, required=True)
        p.add_argument("--g", type=float, required=True)
        if levels:
            p.add_argument("--levels", type=_positive_int, default=10)

    def output(p):
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--timing", action="store_true", help="record wall time in JSON meta")

    spectrum = sub.add_parser("spectrum", help="compute a spectrum")
    models = spectrum.add_subparsers(dest="model", required=True, parser_class=_Parser)

    hl = models.add_parser("hl", help="generalized model H_L (r = 1/2)")
    physics(hl, levels=False)
    hl.add_argument("--l", type=_spin, required=True)
    hl.add_argument("--r", type=_spin, default=Spin(1))
    hl.add_argument("--tol", type=_positive_float, default=1e-10)
    hl.add_argument("--solver", choices=["hl-cf", "block-transfer", "oracle"], default="hl-cf")
    output(hl)
    hl.set_defaults(func=cmd_spectrum_hl)

    rabi = models.add_parser("rabi", help="Rabi model, lowest levels")
    physics(rabi, levels=True)
    rabi.add_argument("--tol", type=_positive_float, default=1e-8)
    output(rabi)
    rabi.set_defaults(func=cmd_spectrum_rabi)

    conv = sub.add_parser("converge", help="H_L -> Rabi contraction study")
    physics(conv, levels=True)
    conv.add_argument("--l-list", type=_l_list, required=True)
    conv.add_argument("--out", default=None)
    conv.set_defaults(func=cmd_converge)

    val = sub.add_parser("validate", help="run the seeded validation suites")
    val.add_argument("--suite", choices=["all", "cf", "block", "spectra", "contraction"], default="all")
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--out", default=None)
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, UnsupportedSpin, ValueError) as exc:
        print(f"rabicf: error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"rabicf: computation failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
