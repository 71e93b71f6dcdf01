import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from helpers import target_suite
from loadbal.dp import solve_slot_milp_dp
from loadbal.exact import (
    ExactLimits, LimitsExceeded, LinearFeasibilityProblem, enumerate_type_guesses, lp_feasible, slot_lp,
    solve_slot_milp_exact,
)
from loadbal.instance import Instance, TargetInterval, classify_jobs, interval_catalog
from loadbal.oracle import brute_force_target
from loadbal.relaxation import check_slot_feasible

F = Fraction


def guesses(inst, q, prune=True):
    cl = classify_jobs(inst, q)
    cat = interval_catalog(inst)
    return [g.profile(cat) for g in enumerate_type_guesses(cl, cat, prune=prune)]


def brute_force_profiles(inst, q, prune):
    """All slot profiles by product over machines, canonicalised per interval type."""
    cl = classify_jobs(inst, q)
    cat = interval_catalog(inst)
    per_machine = list(itertools.product(*(range(c + 1) for c in cl.counts)))
    seen = set()
    for rows in itertools.product(per_machine, repeat=inst.m):
        if any(sum(r[k] for r in rows) != cl.counts[k] for k in range(q)):
            continue
        key = tuple(tuple(sorted((rows[i] for i in cat.machines_of(r)), reverse=True)) for r in range(cat.K))
        if prune:
            clash = False
            for group in key:
                for a, b in itertools.combinations(set(group), 2):
                    if tuple(v & 1 for v in a) == tuple(v & 1 for v in b):
                        clash = True
            if clash:
                continue
        seen.add(key)
    return seen


def test_single_machine_single_job():
    assert guesses(Instance.uniform([4], 1, 0, 4), 1) == [((1,),)]


def test_two_identical_machines_one_class():
    inst = Instance.uniform([3, 3], 2, 0, 6)
    assert guesses(inst, 1, prune=False) == [((2,), (0,)), ((1,), (1,))]
    # (2) and (0) share parity, so only the averaged profile survives
    assert guesses(inst, 1) == [((1,), (1,))]


@pytest.mark.parametrize("prune", [False, True])
@pytest.mark.parametrize("jobs,m,q,k", [
    ([1, 1, 4, 4], 2, 2, 1),
    ([1, 2, 3, 4, 5, 6], 3, 2, 1),
    ([1, 1, 1, 4, 4], 3, 2, 2),
    ([2, 5, 5, 7, 8], 4, 2, 2),
])
def test_guess_count_matches_brute_force(jobs, m, q, k, prune):
    intervals = [TargetInterval(F(0), F(100 + (i % k))) for i in range(m)]
    inst = Instance(tuple(jobs), tuple(intervals))
    cat = interval_catalog(inst)
    got = guesses(inst, q, prune)
    expect = brute_force_profiles(inst, q, prune)
    canon = {tuple(tuple(sorted((y[i] for i in cat.machines_of(r)), reverse=True)) for r in range(cat.K))
             for y in got}
    assert len(got) == len(canon) == len(expect)
    assert canon == expect


def test_guess_count_frozen():
    inst = Instance.uniform([1, 1, 4, 4], 2, 0, 10)
    assert (len(guesses(inst, 2, prune=False)), len(guesses(inst, 2))) == (5, 1)


def test_exact_examples():
    inst = Instance.uniform([4], 1, 0, 4)
    sol = solve_slot_milp_exact(inst, classify_jobs(inst, 1))
    assert sol and sol.y == ((1,),)
    inst = Instance.uniform([5, 5], 2, 5, 5)
    sol = solve_slot_milp_exact(inst, classify_jobs(inst, 1))
    assert sol and sol.y == ((1,), (1,)) and sol.x.is_integral()


def test_three_threes_on_four_five():
    inst = Instance.uniform([3, 3, 3], 2, 4, 5)
    cl = classify_jobs(inst, 1)
    assert not solve_slot_milp_exact(inst, cl)
    assert not solve_slot_milp_exact(inst, cl, prune=False)
    assert brute_force_target(inst) is None
    # every profile is rejected by the LP itself, not only by the prefilter
    cat = interval_catalog(inst)
    for g in enumerate_type_guesses(cl, cat, prune=False):
        assert lp_feasible(slot_lp(inst, cl, g.profile(cat))) is None


def test_limits():
    inst = Instance.uniform(list(range(1, 12)), 2, 0, 100)
    with pytest.raises(LimitsExceeded, match="limits exceeded: n=11 > 10"):
        solve_slot_milp_exact(inst, classify_jobs(inst, 1))
    inst = Instance.uniform([1, 2], 2, 0, 100)
    with pytest.raises(LimitsExceeded, match="q=3"):
        solve_slot_milp_exact(inst, classify_jobs(inst, 3))
    assert solve_slot_milp_exact(inst, classify_jobs(inst, 3), ExactLimits(q=3))


def test_lp_examples():
    p = LinearFeasibilityProblem(1)
    p.add_equality({0: F(1)}, 1)
    p.add_range({0: F(4)}, 0, 4)
    assert lp_feasible(p) == [1]
    p = LinearFeasibilityProblem(3)
    p.add_equality({0: F(1), 1: F(1), 2: F(1)}, 1)
    p.add_range({0: F(9), 1: F(9), 2: F(9)}, 10, 10)
    assert lp_feasible(p) is None
    p = LinearFeasibilityProblem(2)
    p.add_range({0: F(1)}, 3, 2)
    assert lp_feasible(p) is None


def _solve_square(rows, rhs):
    """Gauss-Jordan over Fractions; None when singular."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        a[c] = [v / a[c][c] for v in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[r][n] for r in range(n)]


def vertex_feasible(p):
    """Feasible iff some basic point (nv tight constraints) satisfies everything."""
    nv = p.num_vars
    hyper = []
    for c, b in p.equalities:
        hyper.append(([c.get(j, F(0)) for j in range(nv)], b))
    for c, lo, hi in p.inequalities:
        row = [c.get(j, F(0)) for j in range(nv)]
        hyper += [(row, lo), (row, hi)]
    for j in range(nv):
        hyper.append(([F(int(t == j)) for t in range(nv)], F(0)))
    for pick in itertools.combinations(hyper, nv):
        x = _solve_square([h[0] for h in pick], [h[1] for h in pick])
        if x is not None and p.satisfied_by(x):
            return True
    return False


@given(st.randoms(use_true_random=False))
def test_lp_agrees_with_vertex_enumeration(rng):
    nv = rng.randint(1, 4)
    p = LinearFeasibilityProblem(nv)
    coef = lambda: {j: F(rng.randint(-3, 4)) for j in range(nv) if rng.random() < 0.7}
    for _ in range(rng.randint(0, 2)):
        p.add_equality(coef(), rng.randint(-2, 6))
    for _ in range(rng.randint(0, 3)):
        lo = F(rng.randint(-4, 6), rng.randint(1, 2))
        p.add_range(coef(), lo, lo + rng.randint(0, 3))
    x = lp_feasible(p)
    assert (x is not None) == vertex_feasible(p)
    if x is not None:
        assert p.satisfied_by(x)


@pytest.mark.parametrize("seed", range(3))
def test_exact_relaxation_ordering(seed):
    """Integral feasible implies exact feasible implies DP feasible; pruning never changes the verdict."""
    feasible = 0
    for inst in target_suite(900 + seed, 30, n_max=7, m_max=3, pmax=10, k_max=2):
        integral = brute_force_target(inst)
        for q in (1, 2):
            cl = classify_jobs(inst, q)
            exact = solve_slot_milp_exact(inst, cl)
            assert bool(exact) == bool(solve_slot_milp_exact(inst, cl, prune=False))
            if integral is not None:
                assert exact
            if exact:
                feasible += 1
                assert check_slot_feasible(inst, cl, exact.x, exact.y).feasible
                assert solve_slot_milp_dp(inst, cl, F(1, inst.n))
    assert feasible > 10


def test_slot_lp_shape():
    inst = Instance.uniform([1, 2, 6], 2, 0, 9)
    cl = classify_jobs(inst, 2)
    p = slot_lp(inst, cl, ((1, 1), (1, 0)))
    assert p.num_vars == 6
    assert len(p.equalities) == inst.n + inst.m * cl.q
    assert len(p.inequalities) == inst.m  # each two-sided row is one range
