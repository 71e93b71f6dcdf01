import json
import subprocess
import sys
from fractions import Fraction

import pytest

from loadbal.cli import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, EXIT_RESOURCE, main
from loadbal.documents import instance_json, load_instance, load_solution, make_solution, parse_solution
from loadbal.instance import Instance, TargetInterval


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_makespan_example(tmp_path, capsys):
    inst = write(tmp_path, "i.json", {"jobs": [3, 3, 3, 3], "machines": [{"lower": 0, "upper": 12}] * 2})
    code, out, _ = run(["solve", "--instance", inst, "--eps", "1/2", "--objective", "makespan"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["objective_value"] == 6 and doc["certified_bound"] == "3/2"
    assert doc["meta"]["calibration"]["q"] == 6


def test_solve_target_infeasible(tmp_path, capsys):
    inst = write(tmp_path, "i.json", {"jobs": [9, 9], "machines": [{"lower": 0, "upper": 2}] * 2})
    code, out, err = run(["solve", "--instance", inst, "--eps", "1/2"], capsys)
    assert code == EXIT_INFEASIBLE and out == "" and "infeasible" in err


@pytest.mark.parametrize("doc,field", [
    ({"jobs": [1, 0], "machines": [{"lower": 0, "upper": 1}]}, "job 1"),
    ({"jobs": [1], "machines": [{"lower": "1/0", "upper": 1}]}, "lower"),
    ({"jobs": [1]}, "machines"),
    ("{not json", "invalid JSON"),
])
def test_malformed_instance(tmp_path, capsys, doc, field):
    inst = write(tmp_path, "i.json", doc)
    code, _, err = run(["solve", "--instance", inst, "--eps", "1/2"], capsys)
    assert code == EXIT_INPUT and field in err


def test_bad_flags(capsys):
    assert run(["solve", "--instance", "x.json", "--eps", "abc"], capsys)[0] == EXIT_INPUT
    assert run(["nonsense"], capsys)[0] == EXIT_INPUT
    assert run(["solve", "--instance", "/nonexistent.json", "--eps", "1"], capsys)[0] == EXIT_INPUT


def test_state_budget_env(tmp_path, capsys, monkeypatch):
    jobs = list(range(1, 13))
    inst = write(tmp_path, "i.json", {"jobs": jobs, "machines": [{"lower": 20, "upper": 30}] * 3})
    monkeypatch.setenv("LOADBAL_MAX_STATES", "2")
    code, _, err = run(["solve", "--instance", inst, "--eps", "1/2"], capsys)
    assert code == EXIT_RESOURCE and "state" in err
    monkeypatch.delenv("LOADBAL_MAX_STATES")
    assert run(["solve", "--instance", inst, "--eps", "1/2"], capsys)[0] == EXIT_OK
    assert run(["solve", "--instance", inst, "--eps", "1/2", "--max-states", "2"], capsys)[0] == EXIT_RESOURCE


def test_exact_flag_limit(tmp_path, capsys):
    inst = write(tmp_path, "i.json", {"jobs": list(range(1, 13)), "machines": [{"lower": 0, "upper": 99}] * 2})
    code, _, err = run(["solve", "--instance", inst, "--eps", "1/2", "--exact"], capsys)
    assert code == EXIT_RESOURCE and "limits exceeded" in err


def test_generate_determinism_and_errors(tmp_path, capsys):
    args = ["generate", "--n", "6", "--m", "2", "--pmax", "10", "--seed", "7"]
    a = run(args, capsys)
    b = run(args, capsys)
    assert a == b and a[0] == EXIT_OK
    assert len(json.loads(a[1])["jobs"]) == 6
    assert run(["generate", "--n", "0", "--m", "2"], capsys)[0] == EXIT_INPUT
    assert run(["generate", "--n", "1", "--m", "3", "--planted-balance"], capsys)[0] == EXIT_INPUT


def test_generate_planted_has_zero_envy(tmp_path, capsys):
    from loadbal.oracle import brute_force_opt

    for seed in range(5):
        code, out, _ = run(["generate", "--n", "8", "--m", "2", "--pmax", "3", "--seed", str(seed),
                            "--planted-balance", "--objective-style", "envy"], capsys)
        assert code == EXIT_OK
        assert brute_force_opt(json.loads(out)["jobs"], 2, "envy") == 0


def test_generated_target_instances_are_feasible(tmp_path, capsys):
    from loadbal.oracle import brute_force_target

    for seed in range(10):
        path = tmp_path / f"g{seed}.json"
        assert run(["generate", "--n", "7", "--m", "3", "--k-intervals", "2", "--seed", str(seed),
                    "--out", str(path)], capsys)[0] == EXIT_OK
        inst = load_instance(path)
        assert len({(t.lower, t.upper) for t in inst.machines}) <= 2
        assert brute_force_target(inst) is not None


def solve_and_verify(tmp_path, capsys, inst_path, extra, eps="1/2"):
    sol = tmp_path / "sol.json"
    code, _, _ = run(["solve", "--instance", inst_path, "--eps", eps, "--out", str(sol)] + extra, capsys)
    assert code == EXIT_OK
    return sol


def test_verify_passes_and_tampering_fails(tmp_path, capsys):
    inst = write(tmp_path, "i.json", {"jobs": [2, 3, 4, 5, 6, 7], "machines": [{"lower": 12, "upper": 14}] * 2
                                      + [{"lower": 0, "upper": 3}]})
    sol = solve_and_verify(tmp_path, capsys, inst, [])
    code, out, _ = run(["verify", "--instance", inst, "--solution", str(sol), "--eps", "1/2"], capsys)
    assert code == EXIT_OK and out.endswith("PASS\n")
    doc = json.loads(sol.read_text())
    # move every job onto machine 2 and keep the loads consistent
    doc["assignment"] = [2] * 6
    doc["loads"] = [0, 0, 27]
    sol.write_text(json.dumps(doc))
    code, _, err = run(["verify", "--instance", inst, "--solution", str(sol), "--eps", "1/2"], capsys)
    assert code == EXIT_INPUT and "machine 2" in err and "VIOLATION" in err


def test_verify_detects_wrong_loads(tmp_path, capsys):
    inst = write(tmp_path, "i.json", {"jobs": [4, 4], "machines": [{"lower": 4, "upper": 4}] * 2})
    sol = write(tmp_path, "s.json", {"assignment": [0, 1], "loads": [4, 5], "objective_value": 0,
                                     "certified_bound": 2, "meta": {}})
    code, _, err = run(["verify", "--instance", inst, "--solution", sol, "--eps", "1/2"], capsys)
    assert code == EXIT_INPUT and "reported loads" in err


@pytest.mark.parametrize("objective", ["makespan", "santa", "envy"])
def test_verify_objective_solutions(tmp_path, capsys, objective):
    inst = write(tmp_path, "i.json", {"jobs": [7, 3, 5, 2, 6, 1], "machines": [{"lower": 0, "upper": 24}] * 3})
    sol = solve_and_verify(tmp_path, capsys, inst, ["--objective", objective])
    code, _, _ = run(["verify", "--instance", inst, "--solution", str(sol), "--eps", "1/2"], capsys)
    assert code == EXIT_OK


def test_solve_trace(tmp_path, capsys):
    inst = write(tmp_path, "i.json", {"jobs": [1, 1, 1, 9, 9, 9], "machines": [{"lower": 15, "upper": 15}] * 2})
    trace = tmp_path / "t.jsonl"
    sol = solve_and_verify(tmp_path, capsys, inst, ["--trace", str(trace)], eps="1")
    lines = [json.loads(line) for line in trace.read_text().splitlines()]
    assert lines and all(r["potential_after"] > r["potential_before"] for r in lines)
    meta = json.loads(sol.read_text())["meta"]
    assert meta["stats"]["swaps_stage1"] + meta["stats"]["swaps_stage2"] == len(lines)


def test_solve_is_deterministic(tmp_path, capsys):
    inst = write(tmp_path, "i.json", {"jobs": [7, 3, 5, 2, 6, 1, 8, 4, 4, 9, 2, 3],
                                      "machines": [{"lower": 15, "upper": 20}] * 3})
    for obj in ("target", "makespan"):
        args = ["solve", "--instance", inst, "--eps", "1/2", "--objective", obj, "--seed", "3"]
        assert run(args, capsys) == run(args, capsys)


def test_bench_csv(capsys):
    code, out, _ = run(["bench", "--suite", "tiny-makespan", "--seed", "1"], capsys)
    assert code == EXIT_OK
    rows = out.splitlines()
    assert rows[0].startswith("instance_id,n,m,q,objective")
    assert len(rows) == 21
    assert run(["bench", "--suite", "tiny-makespan", "--seed", "1"], capsys)[1] == out
    assert run(["bench", "--suite", "nope"], capsys)[0] == EXIT_INPUT


def test_oracle_command(tmp_path, capsys):
    inst = write(tmp_path, "i.json", {"jobs": [2, 2, 3], "machines": [{"lower": 0, "upper": 7}] * 2})
    code, out, _ = run(["oracle", "--instance", inst, "--objective", "makespan"], capsys)
    assert code == EXIT_OK and json.loads(out)["opt"] == 4
    code, out, _ = run(["oracle", "--instance", inst], capsys)
    assert code == EXIT_OK and json.loads(out)["feasible"]
    inst = write(tmp_path, "j.json", {"jobs": [5, 5], "machines": [{"lower": 0, "upper": 4}] * 2})
    assert run(["oracle", "--instance", inst], capsys)[0] == EXIT_INFEASIBLE


def test_document_round_trips():
    inst = Instance((3, 4), (TargetInterval(Fraction(1, 2), Fraction(7)), TargetInterval(Fraction(0), Fraction(9, 4))))
    from loadbal.instance import validate_instance

    assert validate_instance(json.loads(instance_json(inst))) == inst
    sol = make_solution([0, 1], [3, 4], Fraction(1, 3), Fraction(5, 2), {"path": "dp"})
    again = parse_solution(json.loads(sol.to_json()))
    assert again == sol and again.meta == sol.meta


def test_module_entry_point(tmp_path):
    inst = write(tmp_path, "i.json", {"jobs": [5], "machines": [{"lower": 0, "upper": 5}] * 3})
    proc = subprocess.run([sys.executable, "-m", "loadbal", "solve", "--instance", inst, "--eps", "1",
                           "--objective", "makespan"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["objective_value"] == 5
