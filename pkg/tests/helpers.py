"""Seeded instance builders shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from loadbal.instance import Instance, TargetInterval, classify_jobs
from loadbal.relaxation import FractionalAssignment

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    """Log one pass/fail line; conftest prints them all at the end of the run."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def hidden_assignment_instance(rng: random.Random, n: int, m: int, pmax: int, k: int, pad: int = 3) -> Instance:
    """Feasible instance: intervals are padded loads of a random assignment, ``k`` interval types."""
    jobs = [rng.randint(1, pmax) for _ in range(n)]
    loads = [0] * m
    for p in jobs:
        loads[rng.randrange(m)] += p
    k = min(k, m)
    types = list(range(k)) + [rng.randrange(k) for _ in range(m - k)]
    rng.shuffle(types)
    spans: dict[int, tuple[int, int]] = {}
    for i, r in enumerate(types):
        lo, hi = spans.get(r, (loads[i], loads[i]))
        spans[r] = (min(lo, loads[i]), max(hi, loads[i]))
    iv = {r: TargetInterval(Fraction(max(0, lo - rng.randint(0, pad))), Fraction(hi + rng.randint(0, pad)))
          for r, (lo, hi) in spans.items()}
    return Instance(tuple(jobs), tuple(iv[r] for r in types))


def random_interval_instance(rng: random.Random, n: int, m: int, pmax: int, k: int) -> Instance:
    """Intervals drawn near the average load; often infeasible."""
    jobs = [rng.randint(1, pmax) for _ in range(n)]
    avg = sum(jobs) // m
    ivs = []
    for _ in range(min(k, m)):
        lo = rng.randint(max(0, avg - pmax), avg + 2)
        ivs.append(TargetInterval(Fraction(lo), Fraction(lo + rng.randint(0, pmax))))
    return Instance(tuple(jobs), tuple(ivs[i % len(ivs)] if i < len(ivs) else rng.choice(ivs) for i in range(m)))


def target_suite(seed: int, count: int, n_max: int = 8, m_max: int = 3, pmax: int = 12, k_max: int = 2):
    """Mix of planted-feasible and random-interval instances."""
    rng = random.Random(seed)
    out = []
    for t in range(count):
        n = rng.randint(1, n_max)
        m = rng.randint(1, m_max)
        k = rng.randint(1, k_max)
        if t % 2:
            out.append(random_interval_instance(rng, n, m, pmax, k))
        else:
            out.append(hidden_assignment_instance(rng, n, m, pmax, k))
    return out


def lopsided_instance(rng):
    """Class counts divisible by m and tight intervals around total/m.

    ``x = 1/m`` everywhere is then a witness, while the ascending initial fill
    piles the small jobs on machine 0 and forces swaps. May return no jobs.
    """
    m = rng.choice((2, 3))
    q = rng.choice((1, 2, 3))
    pmax = rng.randint(6, 30)
    jobs = [pmax]
    while len(jobs) < 4 * m:
        jobs.append(rng.randint(1, pmax))
    while True:
        # trimming can lower p_max and move class boundaries, so repeat until stable
        inst = Instance.uniform(jobs, m, 0, sum(jobs))
        cl = classify_jobs(inst, q)
        if all(c % m == 0 for c in cl.counts):
            break
        jobs = [jobs[j] for members in cl.classes for j in members[len(members) % m:]]
    total = sum(jobs)
    inst = Instance.uniform(jobs, m, total // m, -(-total // m))
    cl = classify_jobs(inst, q)
    y = tuple(tuple(c // m for c in cl.counts) for _ in range(m))
    x = FractionalAssignment(m, inst.n)
    for i in range(m):
        for j in range(inst.n):
            x[i, j] = Fraction(1, m)
    return inst, cl, x, y
