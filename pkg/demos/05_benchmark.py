"""
Scheme against optimum and greedy
=================================

Run a few benchmark suites and summarise how far the scheme and list
scheduling land from the exhaustive optimum, in units of p_max.
"""

from fractions import Fraction

from loadbal.bench import run_suite

for suite in ("tiny-makespan", "tiny-santa", "tiny-envy", "planted-envy"):
    rows = run_suite(suite, seed=0)
    worst = max(row.gap / max(row.case.jobs) for row in rows)
    better = sum(1 for row in rows if row.gap == 0)
    greedy_gaps = []
    for row in rows:
        g = row.greedy_value - row.oracle_opt
        if row.case.objective.value == "santa":
            g = -g
        greedy_gaps.append(Fraction(g) / max(row.case.jobs))
    print(f"{suite:14s} eps={row.case.eps}  worst scheme gap {float(worst):.3f} p_max, "
          f"optimal on {better}/{len(rows)}, worst greedy gap {float(max(greedy_gaps)):.3f} p_max")
