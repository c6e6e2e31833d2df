import json
import subprocess
import sys

import pytest

from stackr.cli import main
from stackr.core import load_instance


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def instance_file(tmp_path, capsys):
    p = tmp_path / "inst.json"
    assert run(capsys, "gen", "--w", 3, "--d", 3, "--n", 7, "--seed", 11, "--out", p)[0] == 0
    return p


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--w", 2, "--d", 3)
    assert code == 0 and out.strip() == "4"


def test_gen_echoes_seed(capsys, tmp_path):
    code, out, err = run(capsys, "gen", "--w", 2, "--d", 2, "--n", 3)
    assert code == 0 and err.startswith("seed ")
    doc = json.loads(out)
    p = tmp_path / "again.json"
    seed = err.split()[1]
    run(capsys, "gen", "--w", 2, "--d", 2, "--n", 3, "--seed", seed, "--out", p)
    assert json.loads(p.read_text()) == doc


@pytest.mark.parametrize("algo", ["bfs", "bibfs", "astar", "bhpa", "poly-d", "poly-lsr"])
def test_gen_solve_verify(capsys, tmp_path, instance_file, algo):
    sol = tmp_path / "sol.json"
    code, _, _ = run(capsys, "solve", "--in", instance_file, "--algo", algo, "--out", sol)
    assert code == 0
    doc = json.loads(sol.read_text())
    assert doc["cost"] == len(doc["actions"]) and "expansions" in doc["stats"]
    code, out, _ = run(capsys, "verify", "--in", instance_file, "--solution", sol)
    assert code == 0 and out.startswith("valid")


def test_start_equals_goal(capsys, tmp_path, instance_file):
    doc = json.loads(instance_file.read_text())
    doc["goal"] = doc["start"]
    instance_file.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "solve", "--in", instance_file, "--algo", "bhpa")
    assert code == 0 and json.loads(out)["cost"] == 0


def test_invalid_solution(capsys, tmp_path, instance_file):
    inst = load_instance(instance_file)
    empty = next(k for k, s in enumerate(inst.start.stacks, 1) if not s)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"actions": [[empty, 1]]}))
    code, out, _ = run(capsys, "verify", "--in", instance_file, "--solution", bad)
    assert code == 3 and "step 0" in out


def test_malformed_instance_names_field(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text(json.dumps({"version": 1, "num_stacks": 3, "depth": 2, "n": 1, "kind": "labeled",
                             "start": [[1], [], []]}))
    code, _, err = run(capsys, "solve", "--in", p)
    assert code == 2 and "goal" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "solve", "--in", tmp_path / "nope.json")
    assert code == 2 and "error" in err


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--algo", "dfs"])
    assert exc.value.code == 2


def test_timeout(capsys, tmp_path):
    p = tmp_path / "big.json"
    run(capsys, "gen", "--w", 6, "--d", 6, "--n", 36, "--seed", 1, "--out", p)
    code, _, err = run(capsys, "solve", "--in", p, "--algo", "bfs", "--timeout-ms", 1)
    assert code == 1 and "timeout" in err


def test_poly_precondition_failure(capsys, tmp_path):
    # a full buffer leaves the constructive solvers no room
    p = tmp_path / "full.json"
    p.write_text(json.dumps({"version": 1, "num_stacks": 3, "depth": 1, "n": 3,
                             "kind": "labeled", "start": [[1], [2], [3]], "goal": [[2], [1], [3]]}))
    code, _, err = run(capsys, "solve", "--in", p, "--algo", "poly-d")
    assert code == 1 and "cannot solve" in err


def test_bench(capsys, tmp_path):
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps({"seed": 0, "instance_count": 3, "timeout_ms": 2000,
                               "setups": [[2, 2, 2], [2, 2, 3]],
                               "solvers": [{"algo": "astar", "heuristic": "cbh"},
                                           {"algo": "poly-lsr"}]}))
    out_dir = tmp_path / "out"
    code, out, _ = run(capsys, "bench", "--config", cfg, "--out-dir", out_dir)
    assert code == 0 and "2&2&3" in out
    names = {p.name for p in out_dir.iterdir()}
    assert {"results.csv", "table.csv", "table.txt", "success_w2_d2.png", "cost_w2_d2.png"} <= names
    assert len((out_dir / "results.csv").read_text().splitlines()) == 1 + 2 * 3 * 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "stackr", "bounds", "--w", "3", "--d", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "3"
