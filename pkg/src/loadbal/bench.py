"""Benchmark suites: scheme vs. exact optimum vs. list scheduling, as CSV."""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .applications import SOLVERS, greedy_list_schedule
from .generate import planted_balance_jobs
from .instance import Objective, format_rational, objective_value
from .oracle import ORACLE_LIMIT, brute_force_opt

COLUMNS = [
    "instance_id", "n", "m", "q", "objective", "eps", "oracle_opt", "scheme_value", "greedy_value",
    "certified_bound", "gap", "swaps", "dp_states", "wall_time",
]


@dataclass(frozen=True)
class BenchCase:
    instance_id: str
    jobs: tuple[int, ...]
    m: int
    objective: Objective
    eps: Fraction


def _random_cases(prefix: str, objective: Objective, count: int, n_range: tuple[int, int], ms: tuple[int, ...],
                  pmax: int, eps: Fraction) -> Callable[[random.Random], list[BenchCase]]:
    def make(rng: random.Random) -> list[BenchCase]:
        out = []
        for t in range(count):
            n = rng.randint(*n_range)
            m = rng.choice(ms)
            jobs = tuple(rng.randint(1, pmax) for _ in range(n))
            out.append(BenchCase(f"{prefix}-{t:03d}", jobs, m, objective, eps))
        return out

    return make


def _planted_cases(count: int) -> Callable[[random.Random], list[BenchCase]]:
    def make(rng: random.Random) -> list[BenchCase]:
        out = []
        for t in range(count):
            m = rng.choice((2, 3))
            n = rng.randint(max(4, m), 10)
            pmax = rng.randint(2, 3)
            jobs = tuple(planted_balance_jobs(n, m, pmax, rng))
            out.append(BenchCase(f"planted-{t:03d}", jobs, m, Objective.ENVY, Fraction(1, 4)))
        return out

    return make


HALF = Fraction(1, 2)
SUITES: dict[str, Callable[[random.Random], list[BenchCase]]] = {
    "tiny-makespan": _random_cases("makespan", Objective.MAKESPAN, 20, (4, 10), (2, 3), 20, HALF),
    "tiny-santa": _random_cases("santa", Objective.SANTA, 20, (4, 10), (2, 3), 20, HALF),
    "tiny-envy": _random_cases("envy", Objective.ENVY, 20, (4, 10), (2, 3), 20, HALF),
    "planted-envy": _planted_cases(20),
    # beyond the oracle's reach, so oracle_opt and gap stay blank
    "medium-makespan": _random_cases("medium", Objective.MAKESPAN, 8, (15, 18), (2, 3), 30, HALF),
}


def suite_cases(suite: str, seed: int) -> list[BenchCase]:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; known: {', '.join(sorted(SUITES))}")
    return SUITES[suite](random.Random(f"{suite}/{seed}"))


@dataclass
class BenchRow:
    case: BenchCase
    q: int
    oracle_opt: Fraction | None
    scheme_value: Fraction
    greedy_value: Fraction
    certified_bound: Fraction
    swaps: int
    dp_states: int
    wall_time: float | None

    @property
    def gap(self) -> Fraction | None:
        """How far the scheme is from the optimum (non-negative when both are exact)."""
        if self.oracle_opt is None:
            return None
        if self.case.objective is Objective.SANTA:
            return self.oracle_opt - self.scheme_value
        return self.scheme_value - self.oracle_opt

    def cells(self) -> list[str]:
        def fmt(v: Fraction | None) -> str:
            return "" if v is None else str(format_rational(v))

        return [
            self.case.instance_id, str(len(self.case.jobs)), str(self.case.m), str(self.q),
            self.case.objective.value, str(self.case.eps), fmt(self.oracle_opt), fmt(self.scheme_value),
            fmt(self.greedy_value), fmt(self.certified_bound), fmt(self.gap), str(self.swaps),
            str(self.dp_states), "" if self.wall_time is None else f"{self.wall_time:.3f}",
        ]


def run_case(case: BenchCase, timing: bool = False) -> BenchRow:
    start = time.perf_counter()
    res = SOLVERS[case.objective](list(case.jobs), case.m, case.eps)
    elapsed = time.perf_counter() - start
    opt = brute_force_opt(case.jobs, case.m, case.objective) if len(case.jobs) <= ORACLE_LIMIT else None
    _, greedy_loads = greedy_list_schedule(case.jobs, case.m)
    return BenchRow(
        case, res.calibration.q, opt, res.value, objective_value(greedy_loads, case.objective),
        res.certified_bound, res.stats.get("swaps_stage1", 0) + res.stats.get("swaps_stage2", 0),
        res.stats.get("states_total", 0), elapsed if timing else None,
    )


def run_suite(suite: str, seed: int, timing: bool = False) -> list[BenchRow]:
    rows = [run_case(c, timing) for c in suite_cases(suite, seed)]
    rows.sort(key=lambda r: r.case.instance_id)
    return rows


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow(r.cells())
    return buf.getvalue()
