"""Command-line entry point: solve, generate, verify, bench, oracle.

Exit codes: 0 solved / passed, 1 input error or failed verification,
2 target instance certified infeasible, 3 resource limit hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .documents import (
    DocumentError, dumps, instance_json, load_instance, load_solution, make_solution, write_text,
)
from .instance import InstanceError, Objective, parse_rational

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_RESOURCE = 3


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text, "argument")
    except InstanceError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fail(code: int, message: str) -> int:
    print(f"loadbal: {message}", file=sys.stderr)
    return code


def _write_trace(path: str | None, records) -> None:
    if path is None:
        return
    write_text(path, "".join(json.dumps(r.as_dict()) + "\n" for r in records))


def cmd_solve(args: argparse.Namespace) -> int:
    from .applications import SOLVERS, calibrate, solve_target
    from .dp import StateBudgetExceeded
    from .exact import LimitsExceeded

    inst = load_instance(args.instance)
    objective = Objective(args.objective)
    if inst.n == 0:
        return _fail(EXIT_INPUT, "jobs: at least one job is required")
    path = "exact" if args.exact else "auto"
    instrument = args.trace is not None
    try:
        if objective is Objective.TARGET:
            cal = calibrate(args.eps, objective, args.delta)
            sol = solve_target(inst, cal.q, args.delta, path=path, max_states=args.max_states,
                               instrument=instrument)
            if not sol:
                print(f"infeasible ({sol.path}): {sol.reason}", file=sys.stderr)
                return EXIT_INFEASIBLE
            band = (Fraction(1, cal.q) + sol.delta) * inst.p_max
            excess = max(
                max(t.lower - load, load - t.upper, Fraction(0)) for t, load in zip(inst.machines, sol.loads)
            )
            meta = {
                "objective": objective.value,
                "calibration": {"user_eps": str(cal.user_eps), "q": cal.q, "delta": str(sol.delta)},
                "path": sol.path,
                "seed": args.seed,
                "stats": dict(sorted(sol.stats.items())),
            }
            doc = make_solution(sol.assignment, sol.loads, excess, band, meta)
            records = sol.records
        else:
            if args.delta is not None:
                return _fail(EXIT_INPUT, "--delta applies to the target objective only")
            res = SOLVERS[objective](list(inst.jobs), inst.m, args.eps, path="exact" if args.exact else "dp",
                                     max_states=args.max_states, instrument=instrument)
            meta = res.meta()
            meta["seed"] = args.seed
            doc = make_solution(res.assignment, res.loads, res.value, res.certified_bound, meta)
            records = res.records
    except (StateBudgetExceeded, LimitsExceeded) as exc:
        return _fail(EXIT_RESOURCE, str(exc))
    except ValueError as exc:
        return _fail(EXIT_INPUT, str(exc))
    _write_trace(args.trace, records)
    write_text(args.out, doc.to_json())
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    from .generate import generate_instance

    inst = generate_instance(
        args.n, args.m, args.pmax, k_intervals=args.k_intervals, style=args.objective_style,
        seed=args.seed, planted_balance=args.planted_balance,
    )
    write_text(args.out, instance_json(inst))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    from .verify import verify_solution

    inst = load_instance(args.instance)
    sol = load_solution(args.solution)
    report = verify_solution(inst, sol, args.eps, args.delta)
    if report.ok:
        sys.stdout.write(report.text())
        return EXIT_OK
    sys.stderr.write(report.text())
    return EXIT_INPUT


def cmd_bench(args: argparse.Namespace) -> int:
    from .bench import SUITES, rows_to_csv, run_suite

    if args.suite not in SUITES:
        return _fail(EXIT_INPUT, f"unknown suite {args.suite!r}; known: {', '.join(sorted(SUITES))}")
    rows = run_suite(args.suite, args.seed, timing=args.timing)
    write_text(args.out, rows_to_csv(rows))
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    from .oracle import OracleLimitExceeded, brute_force_opt, brute_force_target

    inst = load_instance(args.instance)
    objective = Objective(args.objective)
    try:
        if objective is Objective.TARGET:
            assignment = brute_force_target(inst)
            if assignment is None:
                print("infeasible", file=sys.stderr)
                return EXIT_INFEASIBLE
            doc = {"feasible": True, "assignment": assignment}
        else:
            opt = brute_force_opt(inst.jobs, inst.m, objective)
            doc = {"objective": objective.value, "opt": str(opt) if opt.denominator != 1 else opt.numerator}
    except OracleLimitExceeded as exc:
        return _fail(EXIT_RESOURCE, str(exc))
    write_text(args.out, dumps(doc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loadbal", description="Additive approximation for target load balancing.")
    sub = parser.add_subparsers(dest="command", required=True)
    objectives = [o.value for o in Objective]

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--delta", type=_rational, default=None)
    p.add_argument("--objective", choices=objectives, default="target")
    p.add_argument("--exact", action="store_true", help="force the exact enumeration path")
    p.add_argument("--trace", default=None, help="write swap records as JSON lines")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-states", type=int, default=None, help="DP state budget (default: $LOADBAL_MAX_STATES)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--pmax", type=int, default=10)
    p.add_argument("--k-intervals", type=int, default=1)
    p.add_argument("--objective-style", choices=objectives, default="target")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--planted-balance", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check a solution against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--delta", type=_rational, default=Fraction(0))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run a benchmark suite and write CSV")
    p.add_argument("--suite", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timing", action="store_true", help="fill the wall_time column (not reproducible)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="exhaustive ground truth for tiny instances")
    p.add_argument("--instance", required=True)
    p.add_argument("--objective", choices=objectives, default="target")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (DocumentError, InstanceError) as exc:
        return _fail(EXIT_INPUT, str(exc))


if __name__ == "__main__":
    sys.exit(main())
