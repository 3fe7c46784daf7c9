"""Command line interface: single solves, convergence sweeps, stability checks.

Exit codes: 0 success, 1 solver failure (partial outputs are still
written), 2 invalid arguments or unusable output path.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .analysis import (
    boundary_stability_check,
    convergence_table,
    convexity_fraction,
    laplacian_stability_check,
)
from .continuation import SolveFailure, SweepConfig, SweepFailure, solve_once, sweep
from .lsq import LsqError
from .poly import CoeffTriangle, graded_indices, triangle_size
from .problems import exp_problem, quadratic_problem, taylor_start

SWEEP_COLUMNS = [
    "degree", "unknowns", "K_D", "K_B",
    "rmse_solution", "max_solution", "max_boundary", "max_pde",
    "sum_sq_initial", "sum_sq_final", "iterations", "termination",
]
STABILITY_COLUMNS = ["check", "degree", "trials", "fill_distance", "worst_ratio", "seed"]
COEFF_COLUMNS = ["m", "n", "value"]

_SWEEP_INTS = {"degree", "unknowns", "K_D", "K_B", "iterations"}
_SWEEP_STRINGS = {"termination"}


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _make_problem(name: str):
    return exp_problem() if name == "exp" else quadratic_problem(1.0)


def parse_degree_range(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:step:b (e.g. 0:2:12), got {text!r}")
    try:
        first, step, last = (int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-integer degree range {text!r}") from None
    if first < 0 or step <= 0 or last < first:
        raise argparse.ArgumentTypeError(f"bad degree range {text!r}")
    return tuple(range(first, last + 1, step))


def _open_out(path):
    if path is None:
        return None
    try:
        return open(path, "w", newline="")
    except OSError as err:
        raise _CliError(2, f"cannot write output path {path!r}: {err}") from err


def _fmt(value):
    return "" if value is None else str(value)


def write_rows(handle, columns, rows, fmt: str):
    """Write dict rows as CSV (with header) or JSON lines."""
    if fmt == "csv":
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
    else:
        for row in rows:
            handle.write(json.dumps({c: row[c] for c in columns}) + "\n")


def read_sweep_rows(path) -> list[dict]:
    """Parse a sweep output file (CSV or JSON lines) back into typed rows."""
    rows = []
    with open(path) as handle:
        text = handle.read()
    if text.lstrip().startswith("{"):
        for line in text.splitlines():
            if line.strip():
                rows.append(json.loads(line))
        return rows
    for record in csv.DictReader(text.splitlines()):
        row = {}
        for key, value in record.items():
            if key in _SWEEP_STRINGS:
                row[key] = value
            elif value == "":
                row[key] = None
            elif key in _SWEEP_INTS:
                row[key] = int(value)
            else:
                row[key] = float(value)
        rows.append(row)
    return rows


def write_coeffs(handle, coeffs: CoeffTriangle, fmt: str = "csv"):
    """Dump a coefficient triangle as (m, n, value) rows in graded-lex order."""
    rows = [
        {"m": m, "n": n, "value": float(v)}
        for (m, n), v in zip(graded_indices(coeffs.degree), coeffs.vec)
    ]
    write_rows(handle, COEFF_COLUMNS, rows, fmt)


def read_coeffs(path) -> CoeffTriangle:
    """Read an (m, n, value) coefficient file; degree is max(m + n)."""
    entries = {}
    with open(path) as handle:
        text = handle.read()
    if text.lstrip().startswith("{"):
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
    else:
        records = list(csv.DictReader(text.splitlines()))
    for rec in records:
        entries[(int(rec["m"]), int(rec["n"]))] = float(rec["value"])
    if not entries:
        raise ValueError(f"no coefficients found in {path!r}")
    degree = max(m + n for m, n in entries)
    return CoeffTriangle.from_entries(degree, entries)


def _sweep_config(args, degrees, start_mode) -> SweepConfig:
    return SweepConfig(
        degrees=degrees,
        start_mode=start_mode,
        boundary_weight=args.weight,
        oversample_safety=args.oversample,
        grid_resolution=args.grid,
    )


def _print_report(report, problem):
    print(f"problem: {problem.name}")
    print(
        f"degree {report.degree}, {triangle_size(report.degree)} unknowns, "
        f"{report.points.domain_points.shape[0]} domain + "
        f"{report.points.boundary_points.shape[0]} boundary points"
    )
    print(f"initial sum of squares: {report.sum_sq_initial}")
    print(f"final sum of squares: {report.sum_sq_final}")
    print(f"iterations: {report.trace.iterations} ({report.trace.termination})")
    print(f"pde residual 2-norm: {report.pde_residual_norm}")
    print(f"boundary residual 2-norm: {report.boundary_residual_norm}")
    if report.metrics is not None:
        m = report.metrics
        if m.rmse_solution is not None:
            print(f"rmse vs exact: {m.rmse_solution}")
            print(f"max error vs exact: {m.max_solution}")
        print(f"max boundary error: {m.max_boundary}")
        print(f"max pde error: {m.max_pde}")
    print(f"convexity fraction: {convexity_fraction(report.coeffs)}")
    if triangle_size(report.degree) <= 28:
        print("coefficients (m n value):")
        for (m, n), v in zip(graded_indices(report.degree), report.coeffs.vec):
            print(f"  {m} {n} {v}")


def cmd_solve(args) -> int:
    problem = _make_problem(args.problem)
    out = _open_out(args.out)
    try:
        if args.start == "cold-chain":
            degrees = tuple(range(args.degree % 2, args.degree + 1, 2))
            reports = sweep(problem, _sweep_config(args, degrees, "cold_chain"))
            report = reports[-1]
        else:
            if args.start == "file":
                if args.start_file is None:
                    raise _CliError(2, "--start file requires --start-file")
                start = read_coeffs(args.start_file)
                if start.degree > args.degree:
                    raise _CliError(
                        2,
                        f"start file has degree {start.degree} > --degree {args.degree}",
                    )
                start = start.embed(args.degree)
            else:
                start = taylor_start(args.degree)
            config = _sweep_config(args, (args.degree,), "taylor")
            report = solve_once(problem, args.degree, start, config)
        _print_report(report, problem)
        if out is not None:
            write_coeffs(out, report.coeffs, args.format)
            print(f"coefficients written to {args.out}")
        return 0
    finally:
        if out is not None:
            out.close()


def cmd_sweep(args) -> int:
    if args.start == "file":
        raise _CliError(2, "sweep supports --start taylor or cold-chain")
    problem = _make_problem(args.problem)
    start_mode = "cold_chain" if args.start == "cold-chain" else "taylor"
    out = _open_out(args.out)
    code = 0
    try:
        try:
            reports = sweep(problem, _sweep_config(args, args.degrees, start_mode))
        except SweepFailure as failure:
            reports = failure.reports
            print(f"solver failure: {failure}", file=sys.stderr)
            code = 1
        rows = convergence_table(reports)
        write_rows(out if out is not None else sys.stdout, SWEEP_COLUMNS, rows, args.format)
        return code
    finally:
        if out is not None:
            out.close()


def cmd_stability(args) -> int:
    if args.check == "boundary":
        fill = 0.5 / args.degree**2
        worst = boundary_stability_check(args.degree, args.trials, fill, args.seed)
    else:
        fill = 0.25 / args.degree**2
        worst = laplacian_stability_check(args.degree, args.trials, fill, args.seed)
    print(
        f"{args.check} check, degree {args.degree}, {args.trials} trials, "
        f"fill distance {fill}"
    )
    print(f"worst ratio: {worst}")
    out = _open_out(args.out)
    if out is not None:
        row = {
            "check": args.check,
            "degree": args.degree,
            "trials": args.trials,
            "fill_distance": fill,
            "worst_ratio": worst,
            "seed": args.seed,
        }
        write_rows(out, STABILITY_COLUMNS, [row], args.format)
        out.close()
    return 0


def _add_common(parser):
    parser.add_argument("--problem", choices=["exp", "quadratic"], default="exp")
    parser.add_argument("--weight", type=float, default=10.0,
                        help="boundary residual weight (default 10)")
    parser.add_argument("--oversample", type=float, default=None, metavar="C",
                        help="use the oversampled grid with safety factor C")
    parser.add_argument("--grid", type=int, default=101,
                        help="metrics grid resolution (default 101)")
    parser.add_argument("--out", default=None, help="output file path")
    parser.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macolloc",
        description="Meshfree polynomial collocation for the planar "
        "Monge-Ampere Dirichlet problem on [-1, 1]^2.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve at a single degree")
    p_solve.add_argument("--degree", type=int, required=True)
    p_solve.add_argument("--start", choices=["taylor", "cold-chain", "file"],
                         default="taylor")
    p_solve.add_argument("--start-file", default=None,
                         help="coefficient file (m,n,value) for --start file")
    _add_common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="degree-continuation convergence sweep")
    p_sweep.add_argument("--degrees", type=parse_degree_range, default=(0, 2, 4, 6, 8, 10, 12),
                         metavar="A:STEP:B", help="degree list (default 0:2:12)")
    p_sweep.add_argument("--start", choices=["taylor", "cold-chain", "file"],
                         default="cold-chain")
    _add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_stab = sub.add_parser("stability", help="empirical sup-norm stability checks")
    p_stab.add_argument("--degree", type=int, required=True)
    p_stab.add_argument("--trials", type=int, default=100)
    p_stab.add_argument("--check", choices=["boundary", "laplacian"], required=True)
    _add_common(p_stab)
    p_stab.set_defaults(func=cmd_stability)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except (SolveFailure, SweepFailure, LsqError) as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
