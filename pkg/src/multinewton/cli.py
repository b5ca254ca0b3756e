"""Command-line front end.

Subcommands::

    multinewton solve   --function "cos(x)-x" --x0 1.0 --m 2
    multinewton analyze --function "x^2+x" --x0 0.01 --m 2 --gamma 0
    multinewton bench   [--m-range 1-4] [--functions f1,f3] [--format csv]
    multinewton catalog

Exit codes: 0 success, 1 non-convergence or a benchmark row outside
tolerance, 2 parse/domain/usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import corpus
from .analysis import NoConvergence, analyze
from .expr import ParseError, parse
from .precision import PrecisionContext
from .solver import (
    DEFAULT_DIGITS,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    Problem,
    SolverConfig,
    Status,
    Stopping,
    reported_evaluations,
    solve,
)

BENCH_COLUMNS = ("function", "x0", "m", "iterations", "evaluations", "coc", "match")
ITERATION_TOLERANCE = 1
COC_TOLERANCE = 0.3
DEFAULT_SHOW_DIGITS = 50

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunSpec:
    mode: str
    function_text: str | None = None
    x0: str | None = None
    m: int = 2
    tol: str = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    digits: int = DEFAULT_DIGITS
    gamma: str | None = None
    output_format: str = "table"
    m_range: tuple[int, ...] = (1, 2, 3, 4)
    functions: tuple[str, ...] | None = None
    show_digits: int | None = DEFAULT_SHOW_DIGITS
    stopping: str = "listing"
    jobs: int = 1

    def __post_init__(self):
        if self.mode not in ("solve", "analyze", "bench"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.output_format not in ("table", "csv", "json"):
            raise UsageError(f"unknown format {self.output_format!r}")
        if self.mode != "bench" and (self.function_text is None or self.x0 is None):
            raise UsageError(f"{self.mode} needs --function and --x0")
        for value in (self.x0, self.gamma):
            if value is not None:
                _exact_number(value)
        try:
            for m in (self.m,) + tuple(self.m_range):
                self.config(m)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def config(self, m=None, stopping=None) -> SolverConfig:
        return SolverConfig(
            m=self.m if m is None else m,
            tol=self.tol,
            max_iter=self.max_iter,
            precision=self.digits,
            stopping=stopping or self.stopping,
        )


def _exact_number(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a decimal number: {text!r}") from exc


def parse_m_range(text: str) -> tuple[int, ...]:
    """``"1-4"`` or ``"1,2,5"`` (or a mix) to a sorted tuple of orders."""
    values = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = part.split("-", 1)
                values.update(range(int(lo), int(hi) + 1))
            elif part:
                values.add(int(part))
    except ValueError as exc:
        raise UsageError(f"bad --m-range {text!r}") from exc
    if not values or min(values) < 1:
        raise UsageError(f"bad --m-range {text!r}")
    return tuple(sorted(values))


# ---------------------------------------------------------------- output


def _emit_csv(rows, columns, out):
    writer = csv.DictWriter(out, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def _emit_table(rows, columns, out):
    cells = [[str(c) for c in columns]] + [
        ["" if row.get(c) is None else str(row.get(c)) for c in columns] for row in rows
    ]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    for i, r in enumerate(cells):
        out.write("  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip() + "\n")
        if i == 0:
            out.write("  ".join("-" * w for w in widths) + "\n")


def _emit_json(obj, out):
    json.dump(obj, out, indent=2)
    out.write("\n")


def _coc_number(ctx, value, digits=8):
    """Float with a fixed number of significant digits (stable in csv/json)."""
    if value is None:
        return None
    return float(ctx.mp.nstr(value, digits))


# ---------------------------------------------------------------- solve / analyze


def _problem(spec: RunSpec) -> Problem:
    return Problem("user", parse(spec.function_text), spec.x0, reference_root=spec.gamma)


def _trace_rows(result, ctx, show_digits):
    rows = []
    for r in result.trace:
        rows.append(
            {
                "n": r.n,
                "x": ctx.format(r.x, show_digits),
                "step": None if r.step is None else ctx.format_sci(r.step, 3),
                "residual": ctx.format_sci(r.residual, 3),
                "f_evals": r.f_evals_cum,
                "dfdx_evals": r.dfdx_evals_cum,
                "partial": r.partial,
            }
        )
    return rows


def _summary(result, ctx, show_digits):
    f_count, total = reported_evaluations(result)
    return {
        "status": str(result.status),
        "root": ctx.format(result.root, show_digits),
        "iterations": result.iterations,
        "function_evaluations": f_count,
        "evaluations": total,
        "raw_f_evals": result.total_f_evals,
        "raw_dfdx_evals": result.total_dfdx_evals,
        "message": result.message,
    }


def _exit_code(result):
    if result.status is Status.CONVERGED:
        return EXIT_OK
    if result.status is Status.DOMAIN_ERROR:
        return EXIT_USAGE
    return EXIT_FAIL


def cmd_solve(spec: RunSpec, out=sys.stdout, err=sys.stderr) -> int:
    problem = _problem(spec)
    config = spec.config()
    result = solve(problem, config)
    ctx = config.context()
    rows = _trace_rows(result, ctx, spec.show_digits)
    summary = _summary(result, ctx, spec.show_digits)
    columns = ("n", "x", "step", "residual", "f_evals", "dfdx_evals")
    if spec.output_format == "json":
        _emit_json({**summary, "m": config.m, "trace": rows}, out)
    elif spec.output_format == "csv":
        _emit_csv(rows, columns + ("partial",), out)
    else:
        view = [{**r, "n": f"{r['n']}*" if r["partial"] else r["n"]} for r in rows]
        _emit_table(view, columns, out)
        if any(r["partial"] for r in rows):
            out.write("* stopped inside the iteration; not counted\n")
        out.write("\n")
        for key, value in summary.items():
            if value != "":
                out.write(f"{key}: {value}\n")
    if result.status is not Status.CONVERGED:
        err.write(f"error: {result.status}: {result.message}\n")
    return _exit_code(result)


def cmd_analyze(spec: RunSpec, out=sys.stdout, err=sys.stderr) -> int:
    problem = _problem(spec)
    config = spec.config()
    result = solve(problem, config)
    ctx = config.context()
    summary = _summary(result, ctx, spec.show_digits)
    if result.status is not Status.CONVERGED:
        err.write(f"error: {result.status}: {result.message}\n")
        if spec.output_format == "json":
            _emit_json(summary, out)
        return _exit_code(result)
    try:
        report = analyze(result, problem, gamma=spec.gamma)
    except NoConvergence as exc:
        err.write(f"warning: root refinement failed: {exc}\n")
        if spec.output_format == "json":
            _emit_json(summary, out)
        return EXIT_FAIL

    for w in report.warnings:
        err.write(f"warning: {w}\n")

    def num(v, digits=8):
        return _coc_number(ctx, v, digits)

    coc_rows = [
        {"n": n, "coc": num(rho), "second_last": n == report.second_last_index}
        for n, rho in report.coc.items()
    ]
    analysis = {
        "gamma": ctx.format(report.gamma, spec.show_digits),
        "second_last_coc": num(report.second_last_coc),
        "fitted_order": num(report.fitted_order),
        "observed_constant": None if report.observed_constant is None
        else ctx.format_sci(report.observed_constant, 10),
        "predicted_constant": None if report.predicted_constant is None
        else ctx.format_sci(report.predicted_constant, 10),
        "constant_ratio": num(report.constant_ratio, 10),
        "warnings": list(report.warnings),
    }
    if spec.output_format == "json":
        _emit_json({**summary, "m": config.m, "coc": coc_rows, **analysis}, out)
    elif spec.output_format == "csv":
        _emit_csv(coc_rows, ("n", "coc", "second_last"), out)
    else:
        for key, value in summary.items():
            if value != "":
                out.write(f"{key}: {value}\n")
        out.write("\n")
        for row in coc_rows:
            mark = "  <- second-last iteration" if row["second_last"] else ""
            out.write(f"rho[{row['n']}] = {row['coc']}{mark}\n")
        if not coc_rows:
            out.write("no COC values\n")
        out.write("\n")
        for key, value in analysis.items():
            if key != "warnings" and value is not None:
                out.write(f"{key}: {value}\n")
    return EXIT_OK


# ---------------------------------------------------------------- bench


def _classify(actual_it, actual_coc, expected):
    if actual_it is None or actual_coc is None:
        return "deviates"
    d_it = abs(actual_it - expected.iterations)
    coc_ok = abs(actual_coc - expected.coc) <= COC_TOLERANCE
    if d_it == 0 and coc_ok:
        return "exact"
    if d_it <= ITERATION_TOLERANCE and coc_ok:
        return "within-1"
    return "deviates"


def _measure(entry, config):
    result = solve(entry.problem, config)
    ctx = config.context()
    iterations = evaluations = coc = None
    note = ""
    if result.status is Status.CONVERGED:
        iterations = result.iterations
        evaluations = reported_evaluations(result)[1]
        try:
            report = analyze(result, entry.problem)
            coc = _coc_number(ctx, report.second_last_coc, 6)
            if coc is None:
                note = "no COC available"
        except NoConvergence as exc:
            note = f"root refinement failed: {exc}"
    else:
        note = f"{result.status}: {result.message}"
    return result, ctx, iterations, evaluations, coc, note


def bench_row(name: str, m: int, tol=DEFAULT_TOL, digits=DEFAULT_DIGITS,
              max_iter=DEFAULT_MAX_ITER, stopping="listing") -> dict:
    """Run one corpus entry at one order and compare with the published triple."""
    entry = corpus.get(name)
    config = SolverConfig(m=m, tol=tol, max_iter=max_iter, precision=digits, stopping=stopping)
    result, ctx, iterations, evaluations, coc, note = _measure(entry, config)
    expected = entry.expected.get(m)
    row = {
        "function": name,
        "x0": entry.problem.x0,
        "m": m,
        "iterations": iterations,
        "evaluations": evaluations,
        "coc": coc,
        "status": str(result.status),
        "residual": ctx.format_sci(result.trace[-1].residual, 3),
        "stopping": str(config.stopping),
        "known_discrepancy": entry.known_discrepancy,
        "note": note,
    }
    if expected is None:
        row["match"] = "no-reference"
        return row
    row["expected"] = {
        "iterations": expected.iterations,
        "evaluations": expected.evaluations,
        "coc": expected.coc,
    }
    row["delta"] = {
        "iterations": None if iterations is None else iterations - expected.iterations,
        "evaluations": None if evaluations is None else evaluations - expected.evaluations,
        "coc": None if coc is None else round(coc - expected.coc, 6),
    }
    if entry.known_discrepancy:
        row["match"] = "known-discrepancy"
        other = Stopping.OUTER if config.stopping is Stopping.LISTING else Stopping.LISTING
        alt = SolverConfig(m=m, tol=tol, max_iter=max_iter, precision=digits, stopping=other)
        _, _, a_it, a_ev, a_coc, a_note = _measure(entry, alt)
        row["alt_stopping"] = {
            "stopping": str(other), "iterations": a_it, "evaluations": a_ev,
            "coc": a_coc, "note": a_note,
        }
    else:
        row["match"] = _classify(iterations, coc, expected)
    return row


def _bench_job(args):
    return bench_row(*args)


def bench(spec: RunSpec) -> list[dict]:
    names = spec.functions or tuple(e.name for e in corpus.builtin_problems())
    jobs = [
        (name, m, spec.tol, spec.digits, spec.max_iter, spec.stopping)
        for name in names
        for m in spec.m_range
    ]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            return list(pool.map(_bench_job, jobs))
    return [_bench_job(j) for j in jobs]


def bench_failed(rows) -> bool:
    return any(
        r["match"] == "deviates" and not r["known_discrepancy"] for r in rows
    )


def cmd_bench(spec: RunSpec, out=sys.stdout, err=sys.stderr) -> int:
    for name in spec.functions or ():
        try:
            corpus.get(name)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from exc
    rows = bench(spec)
    if spec.output_format == "json":
        _emit_json(rows, out)
    elif spec.output_format == "csv":
        _emit_csv(rows, BENCH_COLUMNS, out)
    else:
        view = []
        for r in rows:
            e = r.get("expected") or {}
            ref = f"({e['iterations']},{e['evaluations']},{e['coc']})" if e else ""
            view.append({**r, "published": ref})
        _emit_table(view, BENCH_COLUMNS + ("published", "status"), out)
    for r in rows:
        if r["match"] == "within-1":
            err.write(
                f"note: {r['function']} m={r['m']}: iterations differ by "
                f"{r['delta']['iterations']:+d} from the published table "
                "(stopping-test placement)\n"
            )
        if r["note"]:
            err.write(f"note: {r['function']} m={r['m']}: {r['note']}\n")
    return EXIT_FAIL if bench_failed(rows) else EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=2, help="method order is 2m (default 2)")
    common.add_argument("--tol", default=DEFAULT_TOL, help="stopping tolerance (default 1e-300)")
    common.add_argument("--digits", type=int, default=DEFAULT_DIGITS,
                        help="working precision in decimal digits (default 2005)")
    common.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--stopping", choices=("listing", "outer"), default="listing",
                        help="where the convergence test sits (default listing)")
    common.add_argument("--show-digits", type=int, default=DEFAULT_SHOW_DIGITS,
                        help="digits shown for iterates and roots (default 50)")
    common.add_argument("--full-digits", action="store_true",
                        help="show iterates at full working precision")

    parser = argparse.ArgumentParser(
        prog="multinewton", description="Multistep Newton solvers of order 2m at arbitrary precision."
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in ("solve", "analyze"):
        p = sub.add_parser(mode, parents=[common])
        p.add_argument("--function", required=True, help='e.g. "cos(x) - x"')
        p.add_argument("--x0", required=True)
        p.add_argument("--gamma", help="root estimate used to seed refinement")
    p = sub.add_parser("bench", parents=[common])
    p.add_argument("--m-range", default="1-4", help='orders to run, e.g. "1-4" or "1,3"')
    p.add_argument("--functions", help="comma-separated corpus names (default all)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    sub.add_parser("catalog", help="print the benchmark corpus as JSON")
    return parser


def spec_from_args(args) -> RunSpec:
    kwargs = dict(
        mode=args.mode,
        m=args.m,
        tol=args.tol,
        max_iter=args.max_iter,
        digits=args.digits,
        output_format=args.format,
        show_digits=None if args.full_digits else args.show_digits,
        stopping=args.stopping,
    )
    if args.mode == "bench":
        kwargs["m_range"] = parse_m_range(args.m_range)
        kwargs["jobs"] = max(args.jobs, 1)
        if args.functions:
            kwargs["functions"] = tuple(s.strip() for s in args.functions.split(",") if s.strip())
    else:
        kwargs.update(function_text=args.function, x0=args.x0, gamma=args.gamma)
    return RunSpec(**kwargs)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.mode == "catalog":
        out.write(corpus.catalog_json() + "\n")
        return EXIT_OK
    try:
        spec = spec_from_args(args)
        handler = {"solve": cmd_solve, "analyze": cmd_analyze, "bench": cmd_bench}[spec.mode]
        return handler(spec, out, err)
    except ParseError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def run(argv) -> tuple[int, str, str]:
    """Run the CLI in-process and capture (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
