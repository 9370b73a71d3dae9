"""Command-line surface: one subcommand per module concern.

Every subcommand writes a single table (CSV with a fixed header, or JSON as an
array of objects with the same field names).  Exact rationals are serialized
as "p/q" strings, reals with shortest round-trip repr, so every row can be
parsed back into the originating values without loss.

Exit codes: 0 success, 2 usage or domain error, 3 enumeration guard exceeded,
4 checkpoint incompatibility, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import diophantine, pressure, sumlevel, transfer
from .errors import (CheckpointError, DomainError, InsufficientDepthError,
                     LevelTooLargeError, SumLevelsError, UntranslatableCodeError)
from .exact import BinaryCode, code_to_cylinder

# exact denominators reach tens of thousands of digits near the enumeration
# guards; lift the interpreter's int-to-str ceiling so they serialize
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(2_000_000)

EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_CHECKPOINT = 4
EXIT_IO = 5

CHECKPOINT_DIR_ENV = "SUMLEVELS_CHECKPOINT_DIR"


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def emit(rows: list[dict], header: list[str], fmt: str, out) -> None:
    """Serialize one result table as CSV (fixed header) or JSON (same fields)."""
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[h]) for h in header])
    else:
        payload = [{h: _fmt(row[h]) if isinstance(row[h], Fraction) else row[h] for h in header}
                   for row in rows]
        json.dump(payload, out, indent=2)
        out.write("\n")


def _parse_n_range(args) -> list[int]:
    if args.n is not None:
        return [args.n]
    lo, _, hi = args.n_range.partition(":")
    try:
        lo, hi = int(lo), int(hi)
    except ValueError as exc:
        raise DomainError(f"bad n-range {args.n_range!r}") from exc
    if lo > hi:
        raise DomainError("empty n-range")
    return list(range(lo, hi + 1))


def _checkpoint_path(args, M: int, layout: str) -> Path | None:
    if args.checkpoint:
        return Path(args.checkpoint)
    base = os.environ.get(CHECKPOINT_DIR_ENV)
    if base:
        return Path(base) / f"operator-{layout}-M{M}.ckpt"
    return None


def _cmd_measure(args) -> list[dict]:
    ns = _parse_n_range(args)
    method = args.method
    rows = []
    operator_series = None
    if method == "operator" or (method == "auto" and max(ns) > sumlevel.DEFAULT_FLOAT_GUARD):
        need = [n for n in ns if method == "operator" or n > sumlevel.DEFAULT_FLOAT_GUARD]
        layout = args.layout
        if layout == "auto":
            # uniform layout loses resolution near 0 once n approaches the grid size
            layout = "graded" if max(need) > 1000 else "uniform"
        operator_series = transfer.lambda_operator_series(
            max(need), M=args.grid, layout=layout,
            checkpoint_path=_checkpoint_path(args, args.grid, layout))
    for n in ns:
        if method == "exact":
            mv = sumlevel.lambda_exact(n)
        elif method == "compensated":
            mv = sumlevel.lambda_compensated(n)
        elif method == "operator":
            mv = sumlevel.MeasureValue(approx=float(operator_series[n - 1]), method="operator")
        else:
            if n <= sumlevel.DEFAULT_EXACT_GUARD:
                mv = sumlevel.lambda_exact(n)
            elif n <= sumlevel.DEFAULT_FLOAT_GUARD:
                mv = sumlevel.lambda_compensated(n)
            else:
                mv = sumlevel.MeasureValue(approx=float(operator_series[n - 1]), method="operator")
        rows.append({"n": n, "method": mv.method, "exact": mv.exact, "approx": mv.approx})
    return rows


def _cmd_enumerate(args) -> list[dict]:
    if args.family == "C":
        fam = sumlevel.enumerate_sum_level(args.n, args.guard)
    elif args.family == "complement":
        fam = sumlevel.complement_family(args.n, args.guard)
    else:
        members = [iv for _, iv in sumlevel.farey_codes(args.n, args.guard)]
        fam = sumlevel.IntervalFamily(args.n, tuple(members), "T")
    codes = None
    if args.coding:
        pairs = (sumlevel.farey_codes(args.n, args.guard) if args.coding == "farey"
                 else sumlevel.sb_codes(args.n, args.guard))
        codes = {(iv.left, iv.right): code for code, iv in pairs}
    rows = []
    for k, m in enumerate(fam.members, start=1):
        row = {"level": args.n, "position": k, "left": m.left, "right": m.right,
               "diameter": m.diameter}
        if codes is not None:
            row["code"] = codes[(m.left, m.right)]
        rows.append(row)
    return rows


def _cmd_codes(args) -> list[dict]:
    if args.coding == "farey":
        codes = sumlevel.sum_level_farey_codes(args.n, args.guard)
    elif args.coding == "sb":
        codes = sumlevel.sum_level_sb_codes(args.n, args.guard)
    else:
        codes = ["[" + ",".join(map(str, code_to_cylinder(BinaryCode(c)).digits)) + "]"
                 for c in sumlevel.sum_level_farey_codes(args.n, args.guard)]
    return [{"n": args.n, "position": k, "code": c} for k, c in enumerate(codes, start=1)]


def _cmd_operator_check(args) -> list[dict]:
    report = transfer.monotone_class_check(args.n_max, M=args.grid)
    return [{
        "check": "monotone-class",
        "n_max": report.n_checked,
        "grid": report.M,
        "passed": report.passed,
        "first_violation": "" if report.first_violation is None else
            "iter={} node={} kind={}".format(*report.first_violation),
    }]


def _cmd_pressure(args) -> list[dict]:
    ts = [float(t) for t in args.t_list.split(",")] if args.t_list else list(pressure.DEFAULT_T_SET)
    rows = []
    for t in ts:
        probe = pressure.pressure_probe(args.n, t, args.family, args.guard)
        rows.append({"n": probe.n, "t": probe.t, "family": probe.family,
                     "log_sum": probe.log_sum, "estimate": probe.estimate})
    return rows


def _cmd_dioph(args) -> list[dict]:
    if args.samples < 1:
        raise DomainError("samples must be >= 1")
    n_grid = [int(v) for v in args.n_grid.split(",")]
    samples = diophantine.sample_digits(args.seed, args.samples, args.bits)
    rows = []
    for s in samples:
        for rec in diophantine.stat_series(s, n_grid):
            rows.append({"sample_id": s.sample_id, "n": rec.n,
                         "khintchine": rec.khintchine, "algebraic": rec.algebraic,
                         "theta": rec.theta, "ratio": rec.ratio})
    return rows


_HEADERS = {
    "measure": ["n", "method", "exact", "approx"],
    "enumerate": ["level", "position", "left", "right", "diameter"],
    "codes": ["n", "position", "code"],
    "operator-check": ["check", "n_max", "grid", "passed", "first_violation"],
    "pressure": ["n", "t", "family", "log_sum", "estimate"],
    "dioph": ["sample_id", "n", "khintchine", "algebraic", "theta", "ratio"],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sumlevels",
                                     description="Measures and codings of continued-fraction sum-level sets")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", help="output file (default stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="level measures by exact, compensated, or operator method")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int)
    group.add_argument("--n-range", help="inclusive range lo:hi")
    p.add_argument("--method", choices=("exact", "compensated", "operator", "auto"), default="auto")
    p.add_argument("--grid", type=int, default=transfer.DEFAULT_GRID)
    p.add_argument("--layout", choices=("auto", "uniform", "graded"), default="auto",
                   help="operator node layout (auto: graded for long runs)")
    p.add_argument("--checkpoint", help="operator checkpoint file")

    p = sub.add_parser("enumerate", help="interval families of one level")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--family", choices=("C", "complement", "all"), default="C")
    p.add_argument("--coding", choices=("farey", "sb"))
    p.add_argument("--guard", type=int, default=20)

    p = sub.add_parser("codes", help="codes of the level family in interval order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coding", choices=("farey", "sb", "cylinder"), default="farey")
    p.add_argument("--guard", type=int, default=20)

    p = sub.add_parser("operator-check", help="shape invariants of the dual iterates")
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--grid", type=int, default=1 << 14)

    p = sub.add_parser("pressure", help="finite-level pressure estimates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t-list", help="comma-separated exponents")
    p.add_argument("--family", choices=pressure.FAMILIES, default="all")
    p.add_argument("--guard", type=int, default=25)

    p = sub.add_parser("dioph", help="digit statistics of seeded uniform samples")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bits", type=int, default=diophantine.DEFAULT_BITS)
    p.add_argument("--n-grid", default="5,10,15")
    return parser


_COMMANDS = {
    "measure": _cmd_measure,
    "enumerate": _cmd_enumerate,
    "codes": _cmd_codes,
    "operator-check": _cmd_operator_check,
    "pressure": _cmd_pressure,
    "dioph": _cmd_dioph,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows = _COMMANDS[args.command](args)
        header = list(_HEADERS[args.command])
        if args.command == "enumerate" and args.coding:
            header.append("code")
        buf = io.StringIO()
        emit(rows, header, args.format, buf)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(buf.getvalue())
        else:
            sys.stdout.write(buf.getvalue())
    except LevelTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except CheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except (DomainError, UntranslatableCodeError, InsufficientDepthError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SumLevelsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
