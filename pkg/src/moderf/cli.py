"""Command-line front end.

    moderf eval    --delta D --x X [--tol T]
    moderf table   --delta D --x-min A --x-max B --step S [--format csv|json]
    moderf delta1  [--tol T]
    moderf verify  [--seed N] [--trials N] [--delta-max D] [--tol T]
    moderf compare --delta D [--tol T] [--threshold E]

Exit codes: 0 success, 1 usage error, 2 delta out of range,
3 non-convergence, 4 failed verification or comparison.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .contraction import (certify, check_C_lower_bound, check_lemma_a, check_lemma_b,
                          check_lemma_c, empirical_contraction_ratio, find_delta1, g_of)
from .errors import DegenerateInput, DeltaOutOfRange, ModErfError, NonConvergence
from .function_space import check_K_membership, default_x_max, random_K_function
from .picard_solver import check_delta, evaluate_solution, solve
from .shooting_oracle import compare_solutions
from .tau_operator import OperatorParams, apply_tau

EXIT_OK, EXIT_USAGE, EXIT_DELTA, EXIT_NONCONV, EXIT_FAILED = 0, 1, 2, 3, 4

log = logging.getLogger("moderf")


@dataclass
class RunConfig:
    command: str
    delta: float = 0.1
    x: float = 1.0
    x_min: float = 0.0
    x_max: float = 3.0
    step: float = 0.1
    tol: float = 1e-10
    seed: int = 0
    trials: int = 100
    delta_max: float = 0.2
    threshold: float = 1e-6
    format: str = "csv"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="moderf", description="Modified error function by fixed-point iteration.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="value of the modified error function at one point")
    e.add_argument("--delta", type=float, required=True)
    e.add_argument("--x", type=float, required=True)
    e.add_argument("--tol", type=float, default=1e-10, help="stopping tolerance of the iteration")
    e.add_argument("--format", choices=["text", "json"], default="text")

    t = sub.add_parser("table", help="tabulate the function on a uniform grid")
    t.add_argument("--delta", type=float, required=True)
    t.add_argument("--x-min", type=float, default=0.0)
    t.add_argument("--x-max", type=float, default=3.0)
    t.add_argument("--step", type=float, default=0.1)
    t.add_argument("--tol", type=float, default=1e-10)
    t.add_argument("--format", choices=["csv", "json"], default="csv")

    d = sub.add_parser("delta1", help="bracket the contraction threshold delta_1")
    d.add_argument("--tol", type=float, default=1e-6)
    d.add_argument("--format", choices=["text", "json"], default="text")

    v = sub.add_parser("verify", help="randomised checks of the contraction bounds")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--delta-max", type=float, default=0.2)
    v.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")

    c = sub.add_parser("compare", help="distance between fixed-point and shooting solutions")
    c.add_argument("--delta", type=float, required=True)
    c.add_argument("--tol", type=float, default=1e-9, help="stopping tolerance of the iteration")
    c.add_argument("--step-tol", type=float, default=1e-10)
    c.add_argument("--threshold", type=float, default=1e-6)
    return p


def _solve(delta: float, tol: float):
    return solve(OperatorParams(delta, tol / 100.0), stop_tol=tol)


def cmd_eval(args, out) -> int:
    if not (math.isfinite(args.x) and args.x >= 0):
        raise _Usage("--x must be a finite number >= 0")
    report = _solve(args.delta, args.tol)
    y = float(evaluate_solution(report, args.x))
    if args.format == "json":
        out.write(json.dumps({"delta": args.delta, "x": args.x, "y": y,
                              "error_bound": report.a_posteriori_bound,
                              "iterations": report.iterations}) + "\n")
    else:
        out.write(f"{_fmt(y)} +/- {report.a_posteriori_bound:.3g}\n")
    return EXIT_OK


def table_points(x_min: float, x_max: float, step: float) -> np.ndarray:
    n = int(math.floor((x_max - x_min) / step + 1e-9)) + 1
    return x_min + step * np.arange(n)


def cmd_table(args, out) -> int:
    if not args.step > 0:
        raise _Usage("--step must be positive")
    if not (0 <= args.x_min <= args.x_max and math.isfinite(args.x_max)):
        raise _Usage("need 0 <= --x-min <= --x-max")
    xs = table_points(args.x_min, args.x_max, args.step)
    report = _solve(args.delta, args.tol)
    ys = evaluate_solution(report, xs)
    if args.format == "json":
        rows = [{"x": float(a), "y": float(b)} for a, b in zip(xs, ys)]
        out.write(json.dumps(rows) + "\n")
    else:
        lines = ["x,y"] + [f"{_fmt(a)},{_fmt(b)}" for a, b in zip(xs, ys)]
        out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_delta1(args, out) -> int:
    if not args.tol > 0:
        raise _Usage("--tol must be positive")
    lo, hi = find_delta1(args.tol)
    if args.format == "json":
        out.write(json.dumps({"lo": lo, "hi": hi, "tol": args.tol}) + "\n")
    else:
        out.write(f"{_fmt(lo)} {_fmt(hi)}\n")
    return EXIT_OK


def run_verification(seed: int, trials: int, delta_max: float, quad_tol: float) -> dict:
    """Randomised trials of every bound check; deterministic for a given seed."""
    if not 0 < delta_max:
        raise DeltaOutOfRange("--delta-max must be positive")
    check_delta(delta_max)
    rng = np.random.default_rng(seed)
    x_max = default_x_max(delta_max)
    names = ["lemma_a", "lemma_b", "lemma_c", "C_lower_bound", "K_invariance", "contraction_ratio"]
    stats = {n: {"passed": 0, "failed": 0, "skipped": 0, "min_slack": None} for n in names}
    failures: List[dict] = []

    def record(name, holds, slack, trial, detail=None):
        s = stats[name]
        s["passed" if holds else "failed"] += 1
        s["min_slack"] = slack if s["min_slack"] is None else min(s["min_slack"], slack)
        if not holds:
            failures.append({"trial": trial, "check": name, "slack": slack, "detail": detail})

    for trial in range(trials):
        delta = float(delta_max * (1.0 - rng.random()))
        x = float(rng.uniform(0.0, x_max + 1.0))
        h1 = random_K_function(rng, x_max)
        h2 = random_K_function(rng, x_max)
        params = OperatorParams(delta, quad_tol, x_max)
        for bc in (check_lemma_a(h1, h2, delta, x, quad_tol), check_lemma_b(h1, h2, delta, quad_tol),
                   check_lemma_c(h1, delta, x, quad_tol), check_C_lower_bound(h1, delta, quad_tol)):
            record(bc.name, bc.holds, bc.slack, trial, {"delta": delta, "x": x})
        m = check_K_membership(apply_tau(h1, params), 1e-8)
        record("K_invariance", m.in_K, 1e-8 - m.max_violation, trial, m.violated_conditions)
        try:
            ratio = empirical_contraction_ratio(h1, h2, params)
        except DegenerateInput:
            stats["contraction_ratio"]["skipped"] += 1
            continue
        gamma = g_of(delta)
        record("contraction_ratio", ratio <= gamma + 1e-6, gamma - ratio, trial,
               {"delta": delta, "ratio": ratio, "g": gamma})

    return {
        "seed": seed,
        "trials": trials,
        "delta_max": delta_max,
        "quad_tol": quad_tol,
        "certificate": certify(delta_max).to_dict(),
        "checks": stats,
        "failures": failures,
        "all_passed": not failures,
    }


def cmd_verify(args, out) -> int:
    if args.trials < 0:
        raise _Usage("--trials must be >= 0")
    if not args.tol > 0:
        raise _Usage("--tol must be positive")
    report = run_verification(args.seed, args.trials, args.delta_max, args.tol)
    out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report["all_passed"] else EXIT_FAILED


def cmd_compare(args, out) -> int:
    report = _solve(args.delta, args.tol)
    dist = compare_solutions(args.delta, report.solution, tol=args.step_tol * 10, step_tol=args.step_tol)
    out.write(f"{_fmt(dist)}\n")
    return EXIT_OK if dist <= args.threshold else EXIT_FAILED


class _Usage(Exception):
    pass


COMMANDS = {"eval": cmd_eval, "table": cmd_table, "delta1": cmd_delta1,
            "verify": cmd_verify, "compare": cmd_compare}


def _configure_logging():
    level = os.environ.get("MODERF_LOG", "error").upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[List[str]] = None, out=None) -> int:
    _configure_logging()
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except _Usage as exc:
        print(f"moderf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DeltaOutOfRange as exc:
        print(f"moderf: {exc}", file=sys.stderr)
        return EXIT_DELTA
    except NonConvergence as exc:
        print(f"moderf: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except ModErfError as exc:
        print(f"moderf: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
