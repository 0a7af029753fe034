import json

import pytest

from combigrad import cli

TINY_PM = {"family": "pm", "k": 2, "lambda": 10.0, "lr": 0.05, "epochs": 2, "batch": 2, "train_size": 4, "test_size": 2}
TINY_TSP = {"family": "tsp", "k": 4, "lambda": 20.0, "epochs": 1, "batch": 2, "train_size": 4, "test_size": 2, "pool": 10}


@pytest.fixture
def config_file(tmp_path):
    def write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return write


def test_gen_writes_splits_and_audit(tmp_path, config_file):
    out = tmp_path / "data"
    assert cli.main(["gen", "--config", config_file(TINY_PM), "--out", str(out)]) == 0
    assert len((out / "train.jsonl").read_text().splitlines()) == 4
    assert len((out / "test.jsonl").read_text().splitlines()) == 2
    audit = json.loads((out / "audit.json").read_text())
    assert audit["train"]["status"] == "ok"


def test_train_then_eval(tmp_path, config_file):
    cfg = config_file(TINY_PM)
    data, run = tmp_path / "data", tmp_path / "run"
    assert cli.main(["gen", "--config", cfg, "--out", str(data)]) == 0
    assert cli.main(["train", "--config", cfg, "--data", str(data), "--out", str(run)]) == 0

    metrics = [json.loads(line) for line in (run / "metrics.jsonl").read_text().splitlines()]
    assert [m["epoch"] for m in metrics] == [0, 1]
    summary = json.loads((run / "summary.json").read_text())
    assert summary["family"] == "pm"
    assert json.loads((run / "config.json").read_text())["k"] == 2

    evaluated = tmp_path / "eval"
    code = cli.main(
        ["eval", "--config", cfg, "--data", str(data), "--model", str(run / "model.json"), "--out", str(evaluated)]
    )
    assert code == 0
    result = json.loads((evaluated / "eval.json").read_text())
    assert result["size"] == 2
    assert result["test_acc"] == pytest.approx(summary["final"]["test_acc"])


def test_seed_flag_overrides_config(tmp_path, config_file):
    cfg = config_file(TINY_PM)
    cli.main(["train", "--config", cfg, "--seed", "7", "--out", str(tmp_path / "run")])
    assert json.loads((tmp_path / "run" / "config.json").read_text())["seed"] == 7


def test_landscape_multiple_lambdas(tmp_path):
    out = tmp_path / "lab"
    assert cli.main(["landscape", "--lambda", "5", "10", "--res", "4", "--out", str(out)]) == 0
    summary = json.loads((out / "landscape.json").read_text())
    assert [g["lambda"] for g in summary["grids"]] == [5.0, 10.0]
    assert (out / "landscape_toy_three_region_lambda5.csv").exists()


def test_landscape_family_writes_single_csv(tmp_path):
    path = tmp_path / "grid.csv"
    args = ["landscape", "--family", "sp", "--k", "3", "--lambda", "10", "--res", "8", "--out", str(path)]
    assert cli.main(args) == 0
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 1 + 8 * 8
    assert not (tmp_path / "landscape.json").exists()


def test_landscape_csv_path_needs_one_lambda(tmp_path, capsys):
    args = ["landscape", "--lambda", "5", "10", "--res", "4", "--out", str(tmp_path / "grid.csv")]
    assert cli.main(args) == 2
    assert "INPUT_ERROR" in capsys.readouterr().err


def test_compare_tsp_solvers(tmp_path, config_file):
    out = tmp_path / "cmp"
    assert cli.main(["compare", "--config", config_file(TINY_TSP), "--out", str(out)]) == 0
    table = json.loads((out / "compare.json").read_text())
    assert [r["solver"] for r in table["rows"]] == ["exact", "approx"]
    assert 0.0 <= table["approx_on_truth"]["train_acc"] <= 1.0


def test_invalid_config_exits_with_domain_code(tmp_path, config_file, capsys):
    code = cli.main(["train", "--config", config_file({**TINY_PM, "k": 3}), "--out", str(tmp_path)])
    assert code == 2
    assert "INVALID_CONFIG" in capsys.readouterr().err


def test_eval_without_model(tmp_path, config_file):
    assert cli.main(["eval", "--config", config_file(TINY_PM), "--out", str(tmp_path)]) == 2


def test_failed_audit_exits_with_one(tmp_path, config_file, monkeypatch):
    monkeypatch.setattr(cli, "audit_labels", lambda dataset, **kw: {"status": "issues_found"})
    assert cli.main(["gen", "--config", config_file(TINY_PM), "--out", str(tmp_path / "data")]) == 1
    assert (tmp_path / "data" / "audit.json").exists()
