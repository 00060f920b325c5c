"""End-to-end tests for the click commands (src/cli/commands.py).

Each test runs the real pipeline on a small synthetic instance under
``tmp_path``; nothing touches the network.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from src.cli.commands import cli
from src.core.graph import Graph
from src.data.io import save_graph


def run(config_file: Path, *args: str):
    return CliRunner().invoke(cli, ["--config", str(config_file), *args], catch_exceptions=False)


def read_rows(path: Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def metric(path: Path, name: str) -> float:
    return next(float(r["value"]) for r in read_rows(path) if r["metric"] == name)


@pytest.fixture
def clean_config(tmp_path, raw_config_dict) -> Path:
    """Every user reliable; majority vote is exact on this instance."""
    raw = dict(raw_config_dict)
    raw["data"] = {**raw["data"], "synth": {**raw["data"]["synth"], "p_reliable": 1.0}}
    path = tmp_path / "clean.yaml"
    path.write_text(yaml.safe_dump(raw), encoding="utf-8")
    return path


# ── X01: synth ───────────────────────────────────────────


@pytest.mark.integration
def test_synth_writes_dataset(config_file, tmp_path):
    result = run(config_file, "synth")
    assert result.exit_code == 0, result.output
    out = tmp_path / "run"
    assert len(read_rows(out / "edges.csv")) == 180
    assert len(read_rows(out / "labels.csv")) == 60
    assert len(read_rows(out / "truth.csv")) == 120
    report = json.loads((out / "report_synth.json").read_text(encoding="utf-8"))
    assert report["command"] == "synth"
    assert report["seed"] == 7


@pytest.mark.integration
def test_synth_is_byte_identical_per_seed(config_file, tmp_path):
    assert run(config_file, "--out", str(tmp_path / "a"), "synth").exit_code == 0
    assert run(config_file, "--out", str(tmp_path / "b"), "synth").exit_code == 0
    assert run(config_file, "--out", str(tmp_path / "c"), "--seed", "8", "synth").exit_code == 0
    a, b, c = ((tmp_path / d / "edges.csv").read_bytes() for d in "abc")
    assert a == b
    assert a != c


# ── X02: train / eval ────────────────────────────────────


@pytest.mark.integration
def test_train_writes_artifacts(config_file, tmp_path):
    result = run(config_file, "train")
    assert result.exit_code == 0, result.output
    out = tmp_path / "run"
    history = read_rows(out / "history.csv")
    assert [r["epoch"] for r in history] == ["1", "2"]
    assert all(r["eval_accuracy"] != "" for r in history)
    assert 0.0 <= metric(out / "metrics.csv", "accuracy") <= 1.0
    assert len(read_rows(out / "predictions.csv")) == 40
    assert (out / "model.json").exists()
    assert (out / "logs").is_dir()


@pytest.mark.integration
def test_train_is_deterministic(config_file, tmp_path):
    for d in ("a", "b"):
        assert run(config_file, "--out", str(tmp_path / d), "train").exit_code == 0
    assert (tmp_path / "a" / "history.csv").read_bytes() == (tmp_path / "b" / "history.csv").read_bytes()
    assert (tmp_path / "a" / "model.json").read_bytes() == (tmp_path / "b" / "model.json").read_bytes()


@pytest.mark.integration
def test_rerun_from_report(config_file, tmp_path):
    assert run(config_file, "--out", str(tmp_path / "first"), "train").exit_code == 0
    report = tmp_path / "first" / "report_train.json"
    assert run(report, "--out", str(tmp_path / "second"), "train").exit_code == 0
    assert (tmp_path / "first" / "history.csv").read_bytes() == (
        tmp_path / "second" / "history.csv"
    ).read_bytes()


@pytest.mark.integration
def test_eval_matches_training_metrics(config_file, tmp_path):
    assert run(config_file, "train").exit_code == 0
    out = tmp_path / "run"
    for _ in range(2):
        result = run(config_file, "eval")
        assert result.exit_code == 0, result.output
    assert metric(out / "metrics_eval.csv", "accuracy") == metric(out / "metrics.csv", "accuracy")
    assert (out / "predictions_eval.csv").read_bytes() == (out / "predictions.csv").read_bytes()


@pytest.mark.integration
def test_eval_without_model_fails(config_file):
    result = run(config_file, "eval")
    assert result.exit_code == 1


# ── X03: baseline ────────────────────────────────────────


@pytest.mark.integration
@pytest.mark.parametrize("which", ["majority", "em"])
def test_baselines_exact_on_clean_votes(clean_config, tmp_path, which):
    result = run(clean_config, "baseline", "--which", which)
    assert result.exit_code == 0, result.output
    assert metric(tmp_path / "run" / f"metrics_{which}.csv", "accuracy") == 1.0


@pytest.mark.integration
def test_proportional_baseline_runs(config_file, tmp_path):
    result = run(config_file, "baseline", "--which", "proportional")
    assert result.exit_code == 0, result.output
    assert (tmp_path / "run" / "report_baseline_proportional.json").exists()


@pytest.mark.integration
def test_unknown_baseline_rejected(config_file):
    result = CliRunner().invoke(cli, ["--config", str(config_file), "baseline", "--which", "oracle"])
    assert result.exit_code == 2


# ── X04: unfold ──────────────────────────────────────────


@pytest.fixture
def triangle_file(tmp_path, triangle) -> Path:
    return save_graph(triangle, tmp_path / "triangle.csv")


@pytest.mark.integration
def test_unfold_triangle(triangle_file):
    result = CliRunner().invoke(cli, ["unfold", str(triangle_file), "a", "--depth", "2"])
    assert result.exit_code == 0, result.output
    assert "5 nodes (asymmetric, depth 2)" in result.output
    full = CliRunner().invoke(cli, ["unfold", str(triangle_file), "a", "--mode", "full"])
    assert "7 nodes (full, depth 2)" in full.output


@pytest.mark.integration
def test_unfold_errors(triangle_file, tmp_path):
    result = CliRunner().invoke(cli, ["unfold", str(triangle_file), "zz"])
    assert result.exit_code == 1
    assert "'zz'" in result.output
    missing = CliRunner().invoke(cli, ["unfold", str(tmp_path / "none.csv"), "a"])
    assert missing.exit_code == 1


@pytest.mark.integration
def test_unfold_self_loop(tmp_path):
    path = save_graph(Graph(["a"], ["a"], [[1.0]]), tmp_path / "loop.csv")
    result = CliRunner().invoke(cli, ["unfold", str(path), "a", "--depth", "3"])
    assert "2 nodes (asymmetric, depth 3)" in result.output


# ── X05: config handling ─────────────────────────────────


@pytest.mark.integration
def test_check_config(config_file):
    result = run(config_file, "check-config")
    assert result.exit_code == 0
    assert "Config is valid!" in result.output
    assert "depth=1" in result.output


@pytest.mark.integration
def test_invalid_config_exits_1(tmp_path, raw_config_dict):
    raw_config_dict["model"] = {"depth": 2, "level_sizes": [2]}
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(raw_config_dict), encoding="utf-8")
    assert run(path, "train").exit_code == 1
    assert run(path, "check-config").exit_code == 1
    assert run(tmp_path / "missing.yaml", "synth").exit_code == 1
