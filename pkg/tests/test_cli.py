import io
import json
import subprocess
import sys

import pytest

from shadowsimplex import bounds
from shadowsimplex.bounds import BoundInputs
from shadowsimplex.cli import main
from shadowsimplex.polytope import box, cube


@pytest.fixture
def cube3(tmp_path):
    path = tmp_path / "cube3.json"
    path.write_text(json.dumps(cube(3).to_document()))
    return str(path)


def run(argv):
    out = io.StringIO()
    return main(argv, out=out), out.getvalue()


def test_certify_cube(cube3, tmp_path):
    out = tmp_path / "cert.json"
    code, text = run(["certify", "--polytope", cube3, "--seed", "7", "--out", str(out)])
    assert code == 0 and "Bounded" in text
    doc = json.loads(out.read_text())
    assert doc["result"]["kind"] == "Bounded"
    assert doc["config"]["seed"] == 7 and doc["config"]["logk"] == 4.0


def test_certify_output_is_byte_identical(cube3, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        assert run(["certify", "--polytope", cube3, "--seed", "11", "--lambda-mode", "paper", "--out", str(path)])[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_certify_failure_exits_one(tmp_path):
    path = tmp_path / "box.json"
    path.write_text(json.dumps(box([1, 1, 1000]).to_document()))
    code, text = run(["certify", "--polytope", str(path), "--seed", "0", "--max-steps", "3", "--max-restarts", "1"])
    assert code == 1 and "RestartBudgetExhausted" in text


def test_solve_walk(cube3, tmp_path):
    out = tmp_path / "walk.json"
    code, text = run(["solve-walk", "--polytope", cube3, "--seed", "3", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["result"]["first"]["kind"] == "optimum"
    assert doc["result"]["second"]["kind"] == "optimum"


def test_oracle(cube3, tmp_path):
    out = tmp_path / "oracle.json"
    code, _ = run(["oracle", "--polytope", cube3, "--seed", "1", "--out", str(out)])
    doc = json.loads(out.read_text())
    assert code == 0 and doc["bounded"] and len(doc["vertices"]) == 8 and doc["edges"] == 12


def test_experiment_max_exp(tmp_path):
    out = tmp_path / "r.json"
    code, _ = run(["experiment", "--kind", "max-exp", "--n", "10", "--lambda", "1", "--trials", "100000",
                   "--seed", "1", "--out", str(out)])
    doc = json.loads(out.read_text())
    assert code == 0 and abs(doc["estimate"] - 2.929) < 0.01


def test_experiment_csv_and_threads(tmp_path):
    paths = []
    for threads in ("1", "3"):
        p = tmp_path / f"r{threads}.csv"
        argv = ["experiment", "--kind", "angle-round", "--d", "4", "--epsilon", "0.2", "--trials", "100",
                "--seed", "5", "--format", "csv", "--threads", threads, "--out", str(p)]
        assert run(argv)[0] == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]
    assert paths[0].decode().splitlines()[0] == "kind,trials,estimate,std_error,paper_bound,satisfied,seed"


def test_experiment_unsatisfied_exits_one():
    code, text = run(["experiment", "--kind", "start-vertex", "--lambda-mode", "paper", "--trials", "100",
                      "--seed", "1"])
    assert code == 1 and "satisfied False" in text


def test_bounds_prints_value(tmp_path):
    code, text = run(["bounds", "--kind", "shadow-round", "--d", "3", "--n", "8", "--k", "1", "--lambda", "1"])
    assert code == 0
    assert repr(bounds.shadow_bound_round(BoundInputs(3, 8))) in text


def test_unknown_flag_is_usage_error(capsys, cube3):
    code, text = run(["certify", "--polytope", cube3, "--bogus"])
    assert code == 2 and text == ""
    assert "usage" in capsys.readouterr().err


def test_bad_inputs_are_usage_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["certify", "--polytope", str(bad)])[0] == 2
    assert run(["certify", "--polytope", str(tmp_path / "none.json")])[0] == 2
    assert run(["certify", "--polytope", str(bad), "--seed", "-1"])[0] == 2
    assert run(["experiment", "--kind", "max-exp", "--trials", "100"])[0] == 2
    assert run(["bounds", "--kind", "shadow-nonround", "--d", "3", "--n", "8"])[0] == 2


def test_unwritable_out_is_usage_error(cube3, tmp_path):
    assert run(["certify", "--polytope", cube3, "--out", str(tmp_path / "no" / "x.json")])[0] == 2


def test_module_entry_point(cube3):
    proc = subprocess.run([sys.executable, "-m", "shadowsimplex", "oracle", "--polytope", cube3],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "bounded" in proc.stdout
