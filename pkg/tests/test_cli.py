import csv
import io
import json
from pathlib import Path

import pytest

from relaxed_designs.cli import SWEEP_COLUMNS, parse_n_range, run
from relaxed_designs.seeds import default_seeds

GOLDEN = Path(__file__).parent / "golden"


def run_json(capsys, argv):
    code = run(argv)
    return code, json.loads(capsys.readouterr().out)


def test_parse_n_range():
    assert parse_n_range("2..5") == [2, 3, 4, 5]
    assert parse_n_range("2,4") == [2, 4]
    assert parse_n_range("7") == [7]


def test_params(capsys):
    code, doc = run_json(capsys, ["params", "--t", "1", "--n", "2"])
    assert code == 0
    assert doc["params"]["k"] == 49
    assert doc["params"]["n0"] == 5
    assert doc["intermediates"]["min_qubits"] == 5
    assert doc["tool_version"] and "config" in doc


def test_usage_errors(capsys):
    assert run(["bogus"]) == 2
    assert run(["params", "--n", "1"]) == 2
    assert run(["params", "--epsilon", "1.5"]) == 2
    assert run(["params", "--seed-file", "/nonexistent.json"]) == 2
    assert run(["certify", "--n", "2"]) == 2
    assert "rng-seed" in capsys.readouterr().err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"t": 1, "n": 3, "epsilon": 0.05}))
    code, doc = run_json(capsys, ["params", "--config", str(cfg), "--n", "2"])
    assert code == 0
    assert doc["config"]["n"] == 2 and doc["config"]["epsilon"] == 0.05
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert run(["params", "--config", str(cfg)]) == 2


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("RELAXED_DESIGNS_OUTPUT_DIR", str(tmp_path))
    assert run(["params"]) == 0
    assert json.loads((tmp_path / "params.json").read_text())["params"]["k"] == 49


def test_sweep_bound_golden(tmp_path):
    out = tmp_path / "sweep.csv"
    assert run(["sweep", "--metric", "bound", "--t", "1", "--n", "2..4", "--output", str(out)]) == 0
    assert out.read_text() == (GOLDEN / "sweep_bound_t1_n2-4.csv").read_text()


def test_sweep_eta(capsys):
    code = run(["sweep", "--t", "1", "--n", "2..8", "--rng-seed", "0"])
    captured = capsys.readouterr()
    rows = list(csv.DictReader(io.StringIO(captured.out)))
    assert code == 0
    assert list(rows[0]) == SWEEP_COLUMNS
    assert [int(r["n"]) for r in rows] == list(range(2, 9))
    assert all(float(r["eta_hat"]) < 1 for r in rows)
    assert all(r["tpe_verdict"] == "PASS" for r in rows)
    assert "summary" in captured.err


def test_sweep_c_values(capsys):
    assert run(["sweep", "--metric", "bound", "--n", "2", "--c-values", "0.25,0.5,0.75"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [float(r["c_const"]) for r in rows] == [0.25, 0.5, 0.75]
    ks = [int(r["k"]) for r in rows]
    assert ks[0] < ks[1] < ks[2]


def test_tpe(capsys):
    code, doc = run_json(capsys, ["tpe", "--t", "1", "--n", "3", "--rng-seed", "1"])
    assert code == 0
    assert doc["k"] == 57 and doc["eta_hat"] < doc["eta_bound"] < 1
    assert doc["rng_seed"] == 1


def test_certify(capsys):
    code, doc = run_json(capsys, ["certify", "--t", "1", "--n", "2", "--rng-seed", "0"])
    assert code == 0
    report = doc["report"]
    assert report["tpe_verdict"] == "PASS" and report["design_verdict"] == "PASS"
    assert report["L"] == 1


def test_sample_simulate_roundtrip(tmp_path, capsys):
    circ = tmp_path / "circ.json"
    assert run(["sample", "--n", "4", "--k", "3", "--L", "2", "--rng-seed", "5",
                "--output", str(circ)]) == 0
    doc = json.loads(circ.read_text())
    assert doc["rng_seed"] == 5 and len(doc["layers"]) == 4
    code, sim = run_json(capsys, ["simulate", "--circuit", str(circ), "--state", "plus"])
    assert code == 0
    assert sim["norm"] == pytest.approx(1.0, abs=1e-12)
    assert len(sim["state"]) == 16


def test_simulate_from_state_file(tmp_path, capsys):
    circ = tmp_path / "circ.json"
    run(["sample", "--n", "2", "--k", "2", "--rng-seed", "1", "--output", str(circ)])
    state = tmp_path / "state.json"
    state.write_text(json.dumps([[1, 0], [0, 0], [0, 0], [0, 0]]))
    code, sim = run_json(capsys, ["simulate", "--circuit", str(circ), "--state", str(state)])
    assert code == 0 and sim["norm"] == pytest.approx(1.0)


def test_audit(tmp_path, capsys):
    seed_file = tmp_path / "seed.json"
    default_seeds()[1].save(seed_file)
    code, doc = run_json(capsys, ["audit-inverses", "--seed-file", str(seed_file), "--k", "3"])
    assert code == 0
    assert doc["audit"]["pairs_checked"] == 361 and doc["audit"]["passed"]


def test_mc_oracle(capsys):
    code, doc = run_json(capsys, ["mc-oracle", "--n", "1", "--t", "1", "--N", "2000",
                                  "--rng-seed", "3"])
    assert code == 0
    assert doc["distance"] <= doc["threshold"]
