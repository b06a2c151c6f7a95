"""Command-line entry point.

Exit codes: 0 success, 1 bound violation, 2 input error, 3 more than 10%
of instances left unsolved by the LP.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from .bounds import CHECK_TOL, analyze
from .distribution import load_distribution
from .errors import GridSizeError, ValidationError
from .harness import ExperimentConfig, atomic_write, format_rows, run_random_suite, worst_case_search
from .lp import LinearProgram, solve_lp
from .mechanism import DEFAULT_GRID_LIMIT, LPFailure, ProductInstance, build_revenue_lp
from .myerson import optimal_price

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_UNSOLVED = 0, 1, 2, 3
UNSOLVED_FRACTION = 0.10


class InputError(Exception):
    pass


def _num(x: float) -> str:
    return f"{x:.12g}"


def _pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from None
    return lo, hi


def _emit(text: str, out: str | None):
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def cmd_myerson(args) -> int:
    res = optimal_price(load_distribution(args.dist))
    if args.format == "json":
        _emit(json.dumps({"price": res.price, "revenue": res.revenue, "argmax_prices": list(res.argmax_prices)}) + "\n", args.out)
    else:
        argmax = ",".join(_num(p) for p in res.argmax_prices)
        _emit(f"price={_num(res.price)} revenue={_num(res.revenue)} argmax={{{argmax}}}\n", args.out)
    return EXIT_OK


def _slacks_ok(report, tol: float) -> bool:
    return all(s is None or s >= -tol for s in (report.theorem_slack, report.lemma1_slack, report.lemma2_slack))


def cmd_analyze(args) -> int:
    inst = ProductInstance(load_distribution(args.d1), load_distribution(args.d2))
    report = analyze(inst, args.grid_limit)
    if args.format == "json":
        _emit(json.dumps(report.to_dict()) + "\n", args.out)
    else:
        lines = [f"{k}={_num(v) if isinstance(v, float) else v}" for k, v in report.to_dict().items()]
        if report.ratio is not None:
            lines.append(f"ratio={_num(report.ratio)}")
        if report.degenerate:
            lines.append("notice: weaker item has zero revenue; theorem and second lemma skipped")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if _slacks_ok(report, args.tolerance) else EXIT_VIOLATION


def _config(args, **extra) -> ExperimentConfig:
    return ExperimentConfig(
        seed=args.seed,
        support_sizes=(args.min_support, args.max_support),
        value_range=args.value_range,
        alpha_window=args.alpha_window,
        grid_limit=args.grid_limit,
        output_path=args.out,
        format=args.format,
        workers=args.workers,
        **extra,
    )


def cmd_sweep(args) -> int:
    cfg = _config(args, num_instances=args.count)
    summary = run_random_suite(cfg)
    c = summary.counts
    print(
        f"instances={len(summary.results)} ok={c['ok']} degenerate={c['degenerate']} "
        f"violation={c['violation']} unsolved={c['unsolved']} "
        f"max_ratio={_num(summary.max_ratio) if summary.max_ratio is not None else 'n/a'} "
        f"argmax_id={summary.argmax_id}",
        file=sys.stderr,
    )
    if not args.out:
        sys.stdout.write(format_rows([r.row() for r in summary.results], args.format))
    if any(not _slacks_ok(r, args.tolerance) for r in summary.reports):
        return EXIT_VIOLATION
    if summary.results and len(summary.unsolved) > UNSOLVED_FRACTION * len(summary.results):
        return EXIT_UNSOLVED
    return EXIT_OK


def cmd_search(args) -> int:
    cfg = _config(args, restarts=args.restarts, steps=args.steps, start=args.start)
    result = worst_case_search(cfg)
    if result.best_report is None:
        print("no instance found in the alpha window")
        return EXIT_OK
    rep = result.best_report
    print(f"best_ratio={_num(rep.ratio)} alpha={_num(rep.alpha)} g_alpha={_num(rep.g_alpha)} "
          f"theorem_slack={_num(rep.theorem_slack)}")
    print("d1=" + json.dumps(result.best_instance.d1.to_json()))
    print("d2=" + json.dumps(result.best_instance.d2.to_json()))
    if result.violations or not _slacks_ok(rep, args.tolerance):
        return EXIT_VIOLATION
    return EXIT_OK


def load_lp(path: str) -> LinearProgram:
    """Read an LP from JSON.

    ``{"num_vars": n, "objective": [...], "constraints": [{"coefs": {"0": 1.0},
    "rel": "<=", "rhs": 3.0}], "bounds": [[0, null], ...]}``; in ``bounds`` a
    null lower bound is -inf and a null upper bound is +inf.
    """
    try:
        with open(path) as fh:
            data = json.load(fh)
        n = int(data["num_vars"])
        bounds = None
        if "bounds" in data:
            bounds = [(-math.inf if lo is None else float(lo), math.inf if hi is None else float(hi))
                      for lo, hi in data["bounds"]]
        lp = LinearProgram(n, data["objective"], bounds=bounds or [])
        for con in data.get("constraints", []):
            lp.add_constraint({int(k): float(v) for k, v in con["coefs"].items()}, con["rel"], float(con["rhs"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError("lp", f"malformed LP file: {exc}") from exc
    return lp


def cmd_lp_solve(args) -> int:
    if args.lp:
        lp = load_lp(args.lp)
    elif args.d1 and args.d2:
        lp = build_revenue_lp(ProductInstance(load_distribution(args.d1), load_distribution(args.d2)), args.grid_limit)
    else:
        raise InputError("lp-solve needs --lp FILE or both --d1 and --d2")
    if args.dump:
        atomic_write(args.dump, lp.dump())
    sol = solve_lp(lp)
    if args.format == "json":
        payload = {
            "status": sol.status,
            "objective_value": None if math.isnan(sol.objective_value) else sol.objective_value,
            "assignment": [None if math.isnan(v) else float(v) for v in sol.assignment],
            "iterations": sol.iterations,
        }
        _emit(json.dumps(payload) + "\n", args.out)
    else:
        text = f"status={sol.status} objective={_num(sol.objective_value)} iterations={sol.iterations}\n"
        _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tworev", description="Two-item revenue bounds: Myerson pricing, optimal mechanism LP, bound checks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "json"), default=None):
        p.add_argument("--format", choices=formats, default=default or formats[0])
        p.add_argument("--out", default=None, help="write output to FILE (atomically)")
        p.add_argument("--tolerance", type=float, default=CHECK_TOL)
        p.add_argument("--grid-limit", type=int, default=DEFAULT_GRID_LIMIT)

    p = sub.add_parser("myerson", help="optimal posted price for one distribution")
    p.add_argument("--dist", required=True)
    common(p)
    p.set_defaults(func=cmd_myerson)

    p = sub.add_parser("analyze", help="bound report for a pair of distributions")
    p.add_argument("--d1", required=True)
    p.add_argument("--d2", required=True)
    common(p)
    p.set_defaults(func=cmd_analyze)

    def experiment(p, max_support):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--min-support", type=int, default=1)
        p.add_argument("--max-support", type=int, default=max_support)
        p.add_argument("--value-range", type=_pair, default=(0.0, 10.0))
        p.add_argument("--alpha-window", type=_pair, default=None)
        p.add_argument("--workers", type=int, default=1)
        common(p, formats=("csv", "json"))

    p = sub.add_parser("sweep", help="random instance sweep")
    p.add_argument("--count", type=int, default=200)
    experiment(p, 8)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("search", help="hill-climbing search for large Rev/SRev")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--start", choices=("random", "equal_revenue"), default="random")
    experiment(p, 4)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("lp-solve", help="solve an LP file or the revenue LP of two distributions")
    p.add_argument("--lp")
    p.add_argument("--d1")
    p.add_argument("--d2")
    p.add_argument("--dump", help="write the LP in plain-text form to FILE")
    common(p)
    p.set_defaults(func=cmd_lp_solve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, matching the input-error code
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, GridSizeError, InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LPFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSOLVED


if __name__ == "__main__":
    sys.exit(main())
