from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import target_suite
from loadbal.exact import solve_slot_milp_exact
from loadbal.instance import Instance, TargetInterval, classify_jobs
from loadbal.oracle import brute_force_target
from loadbal.relaxation import (
    FractionalAssignment, as_profile, average_pair, average_sizes, check_ordering_conditions,
    check_slot_feasible, norm_sum_not_increased, squared_norm_potential,
)

F = Fraction


def single(u, p=4):
    inst = Instance((p,), (TargetInterval(0, u),))
    return inst, classify_jobs(inst, 1), FractionalAssignment.from_integral([0], 1), ((1,),)


def test_slot_feasible_examples():
    inst, cl, x, y = single(4)
    assert check_slot_feasible(inst, cl, x, y).feasible
    inst, cl, x, y = single(3)
    rep = check_slot_feasible(inst, cl, x, y)
    assert not rep.feasible and rep["upper"].worst == 1
    assert check_slot_feasible(inst, cl, x, y, F(1, 4)).feasible


def test_slot_feasible_dimension_mismatch():
    inst, cl, x, _ = single(4)
    with pytest.raises(ValueError, match="dimension"):
        check_slot_feasible(inst, cl, x, ((1,), (0,)))


def test_slot_feasible_reports_each_constraint():
    inst = Instance.uniform([2, 4], 2, 0, 10)
    cl = classify_jobs(inst, 1)
    x = FractionalAssignment(2, 2, [{0: F(1, 2)}, {0: F(1, 2), 1: F(1, 2)}])
    rep = check_slot_feasible(inst, cl, x, ((1,), (1,)))
    assert {c.name for c in rep.failures()} == {"coverage", "slots"}
    assert rep["coverage"].worst == F(1, 2)


def test_average_sizes_examples():
    inst = Instance.uniform([4, 6], 1, 0, 10)
    cl = classify_jobs(inst, 1)
    z = average_sizes(cl, FractionalAssignment.from_integral([0, 0], 1), ((2,),))
    assert z[0, 0] == 5
    inst = Instance.uniform([2, 4], 2, 0, 10)
    cl = classify_jobs(inst, 1)
    x = FractionalAssignment(2, 2, [{0: F(1, 2), 1: F(1, 2)}, {0: F(1, 2), 1: F(1, 2)}])
    assert average_sizes(cl, x, ((1,), (1,)))[1, 0] == 3
    inst = Instance.uniform([6, 1], 2, 0, 10)
    cl = classify_jobs(inst, 2)
    z = average_sizes(cl, FractionalAssignment.from_integral([0, 0], 2), ((1, 1), (0, 0)))
    assert z[1, 0] is None and z[1, 1] is None


def test_average_sizes_precondition():
    inst = Instance.uniform([4], 1, 0, 10)
    with pytest.raises(ValueError, match="machine 0, class 0"):
        average_sizes(classify_jobs(inst, 1), FractionalAssignment.from_integral([0], 1), ((2,),))


def test_average_pair_example():
    # classes: {1,1} and {4,4}; machine 0 takes both small jobs, machine 1 both large
    inst = Instance.uniform([1, 1, 4, 4], 2, 0, 10)
    cl = classify_jobs(inst, 2)
    x = FractionalAssignment.from_integral([0, 0, 1, 1], 2)
    y = ((2, 0), (0, 2))
    x2, y2 = average_pair(inst, x, y, 0, 1)
    assert y2 == ((1, 1), (1, 1))
    assert all(x2[i, j] == F(1, 2) for i in range(2) for j in range(4))
    assert check_slot_feasible(inst, cl, x2, y2).feasible


def test_average_pair_errors():
    inst = Instance.uniform([1, 1], 2, 0, 10)
    x = FractionalAssignment.from_integral([0, 0], 2)
    with pytest.raises(ValueError):
        average_pair(inst, x, ((2,), (0,)), 0, 0)
    with pytest.raises(ValueError, match="parity"):
        average_pair(inst, FractionalAssignment.from_integral([0, 1], 2), ((1,), (0,)), 0, 1)
    mixed = Instance((1, 1), (TargetInterval(0, 10), TargetInterval(0, 9)))
    with pytest.raises(ValueError, match="different target intervals"):
        average_pair(mixed, x, ((2,), (0,)), 0, 1)


def test_potentials():
    assert squared_norm_potential(((2, 0), (0, 2))) == 8
    assert squared_norm_potential(((1, 1), (1, 1))) == 4
    # orthogonal rows: norm sum strictly drops
    assert norm_sum_not_increased((2, 0), (0, 2)) == (True, True)
    # collinear rows: the norm sum stays equal, only the squared potential is strict
    assert norm_sum_not_increased((2, 0), (4, 0)) == (True, False)
    assert squared_norm_potential(((3, 0), (3, 0))) < squared_norm_potential(((2, 0), (4, 0)))


def _eligible_pairs(inst, y):
    for a in range(inst.m):
        for b in range(a + 1, inst.m):
            if inst.machines[a] == inst.machines[b] and all((u - v) % 2 == 0 for u, v in zip(y[a], y[b])):
                yield a, b


@pytest.mark.parametrize("seed", range(4))
def test_average_pair_preserves_feasibility(seed):
    checked = 0
    for inst in target_suite(100 + seed, 40, m_max=4):
        cl = classify_jobs(inst, 2)
        sol = solve_slot_milp_exact(inst, cl, prune=False)
        if not sol:
            continue
        for a, b in _eligible_pairs(inst, sol.y):
            x2, y2 = average_pair(inst, sol.x, sol.y, a, b)
            assert check_slot_feasible(inst, cl, x2, y2).feasible
            before, after = squared_norm_potential(sol.y), squared_norm_potential(y2)
            assert after <= before
            assert (after < before) == (sol.y[a] != sol.y[b])
            assert norm_sum_not_increased(sol.y[a], sol.y[b])[0]
            checked += 1
    assert checked > 0


@given(st.lists(st.integers(1, 9), min_size=1, max_size=6), st.integers(1, 3), st.integers(1, 3))
def test_integral_solutions_are_relaxation_feasible(jobs, m, q):
    a = [j % m for j in range(len(jobs))]
    loads = [sum(p for p, i in zip(jobs, a) if i == k) for k in range(m)]
    tight = Instance(tuple(jobs), tuple(TargetInterval(v, v) for v in loads))
    cl = classify_jobs(tight, q)
    y = as_profile([[sum(1 for j in members if a[j] == i) for members in cl.classes] for i in range(m)])
    assert check_slot_feasible(tight, cl, FractionalAssignment.from_integral(a, m), y).feasible
    assert brute_force_target(tight) is not None


def test_ordering_conditions_examples():
    inst = Instance.uniform([4], 1, 0, 4)
    cl = classify_jobs(inst, 1)
    assert check_ordering_conditions(inst, cl, [0], ((1,),), ((F(4),),), 0).ok
    inst = Instance.uniform([2, 4], 2, 0, 10)
    cl = classify_jobs(inst, 1)
    rep = check_ordering_conditions(inst, cl, [1, 0], ((1,), (1,)), ((F(2),), (F(4),)), 0)
    assert rep.monotonicity and "class 0, position 1" in rep.monotonicity[0]
    # masked entries never break the chain
    inst = Instance.uniform([1, 10, 10], 3, 0, 20)
    cl = classify_jobs(inst, 2)
    y = ((1, 0), (0, 1), (0, 1))
    z = ((F(1), F(0)), (F(0), F(10)), (F(0), F(10)))
    assert check_ordering_conditions(inst, cl, [0, 1, 2], y, z, 0).ok


def test_ordering_conditions_detect_each_failure():
    inst = Instance.uniform([2, 4], 2, 3, 3)
    cl = classify_jobs(inst, 1)
    y = ((1,), (1,))
    # volume 1 below smallest job 2
    rep = check_ordering_conditions(inst, cl, [0, 1], y, ((F(1),), (F(5),)), 0)
    assert rep.min_jobs_bound and rep.bounds
    # total 7 outside [6, 6]
    rep = check_ordering_conditions(inst, cl, [0, 1], y, ((F(3),), (F(4),)), 0)
    assert rep.total_volume and rep.bounds
    assert check_ordering_conditions(inst, cl, [0, 1], y, ((F(3),), (F(3),)), 0).ok
