import csv
import json

import numpy as np
import pytest

from slmp.cli import main
from slmp.data import load_csv
from slmp.lattice import SlmpModel


def run(*argv):
    return main([str(a) for a in argv])


def test_gen_train_eval_surface(tmp_path, capsys):
    data = tmp_path / "moons.csv"
    assert run("gen", "--dataset", "moons", "--n-samples", 200, "--seed", 1, "--out", data) == 0
    assert load_csv(data).M == 200
    out = tmp_path / "model"
    assert run("train", "--csv", data, "--trainer", "kddccp", "--k", 2, "--train-size", 150, "--out", out,
               "--dump-lp", tmp_path / "lp.txt") == 0
    assert "test_accuracy=" in capsys.readouterr().out
    model = SlmpModel.load(out / "model.json")
    assert model.K == 2
    assert (out / "trace.csv").read_text().startswith("iter,objective,max_weight_delta,lp_pivots,seconds\n")
    assert (tmp_path / "lp.txt").read_text().startswith("vars ")
    assert run("eval", "--model", out / "model.json", "--csv", data) == 0
    acc = float(capsys.readouterr().out.strip().split("=")[1])
    assert 0.5 < acc <= 1.0
    grid = tmp_path / "grid.csv"
    assert run("surface", "--model", out / "model.json", "--csv", data, "--resolution", 4, "--out", grid) == 0
    assert len(grid.read_text().splitlines()) == 17


def test_gen_to_stdout_deterministic(capsys):
    assert run("gen", "--dataset", "blobs", "--n-samples", 10) == 0
    first = capsys.readouterr().out
    assert run("gen", "--dataset", "blobs", "--n-samples", 10) == 0
    assert capsys.readouterr().out == first
    assert first.startswith("x1,x2,label\n")


def test_train_standardized_writes_scaler(tmp_path, capsys):
    X = np.random.default_rng(0).normal(size=(60, 3)) * [1, 100, 1e4]
    y = (X[:, 0] > 0).astype(int)
    data = tmp_path / "d.csv"
    data.write_text("a,b,c,label\n" + "".join(f"{a!r},{b!r},{c!r},{t}\n" for (a, b, c), t in zip(X.tolist(), y)))
    out = tmp_path / "m"
    assert run("train", "--csv", data, "--trainer", "greedy", "--standardize", "--out", out) == 0
    scaler = json.loads((out / "scaler.json").read_text())
    assert len(scaler["mean"]) == 3
    assert run("eval", "--model", out / "model.json", "--csv", data, "--scaler", out / "scaler.json") == 0
    assert capsys.readouterr().out.strip().endswith("accuracy=1.000000")


def test_bench_flags_and_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dataset": "moons", "trainer": "kddccp", "K": 3, "repeats": 2, "n_samples": 120,
                               "train_size": 80}))
    out = tmp_path / "b"
    assert run("bench", "--config", cfg, "--k", 2, "--out", out) == 0
    with open(out / "report.csv") as fh:
        row = next(csv.DictReader(fh))
    assert row["K"] == "2" and row["trainer"] == "kddccp"
    assert json.loads((out / "spec.json").read_text())["repeats"] == 2
    printed = capsys.readouterr().out.splitlines()
    assert printed[0] == "dataset,trainer,K,mean,std,best"


@pytest.mark.parametrize("argv", [
    ["bench", "--repeats", "0", "--out", "x"],
    ["train", "--csv", "does-not-exist.csv", "--out", "x"],
    ["eval", "--model", "missing.json", "--csv", "missing.csv"],
    ["surface", "--model", "missing.json"],
    ["frobnicate"],
    ["train", "--k", "two", "--out", "x"],
    ["bench", "--out", "x", "--config", "missing.json"],
])
def test_input_errors_exit_2(argv, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_training_error_exit_3(tmp_path, monkeypatch, capsys):
    import slmp.cli as cli
    from slmp.errors import TrainingError

    def boom(*a, **k):
        raise TrainingError("LP iteration limit")

    monkeypatch.setattr(cli, "train_one", boom)
    assert run("train", "--dataset", "moons", "--n-samples", 50, "--out", tmp_path / "m") == 3
    assert "LP iteration limit" in capsys.readouterr().err


def test_eval_label_mismatch(tmp_path):
    model = SlmpModel.from_boxes([[0.0]], [[1.0]])
    model.save(tmp_path / "m.json")
    (tmp_path / "d.csv").write_text("x,label\n0.5,yes\n3,no\n")
    assert run("eval", "--model", tmp_path / "m.json", "--csv", tmp_path / "d.csv") == 2


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "slmp", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "bench" in res.stdout
