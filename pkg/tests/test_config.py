"""Tests for configuration validation (src/config/models.py, src/config/loader.py)."""

from __future__ import annotations

import json
from copy import deepcopy
from pathlib import Path

import pytest
from pydantic import ValidationError

from src.config.loader import load_config
from src.config.models import (
    DataConfig,
    LoggingConfig,
    ModelConfig,
    OrderKind,
    RunConfig,
    SynthSpec,
    TrainConfig,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"

# ── C01: Valid config loads ──────────────────────────────


@pytest.mark.unit
def test_valid_config_loads(raw_config_dict):
    config = RunConfig(**raw_config_dict)
    assert config.seed == 7
    assert config.model.level_sizes == [2]
    assert config.train.child_order.policy == OrderKind.RANDOM_SHUFFLE


@pytest.mark.unit
def test_defaults_match_experiment_setup():
    config = RunConfig()
    assert config.data.synth.n_items == 3000
    assert config.data.synth.n_users == 3000
    assert config.data.synth.p_reliable == 0.6
    assert config.data.synth.votes_per_item == 3
    assert config.data.n_train == 1000
    assert config.train.optimizer.rho == 0.95
    assert config.train.optimizer.epsilon == 1e-6
    assert config.baseline.em_alpha == 1.2
    assert config.baseline.em_beta == 1.0


# ── C02: Probabilities bounded ───────────────────────────


@pytest.mark.unit
def test_invalid_probability_rejected():
    with pytest.raises(ValidationError):
        SynthSpec(p_reliable=1.5)


@pytest.mark.unit
def test_votes_exceeding_users_rejected():
    with pytest.raises(ValidationError):
        SynthSpec(n_users=2, votes_per_item=3)


# ── C03: Model shape chain ───────────────────────────────


@pytest.mark.unit
def test_level_sizes_must_match_depth():
    with pytest.raises(ValidationError):
        ModelConfig(depth=3, level_sizes=[2, 3])


@pytest.mark.unit
def test_classification_needs_two_classes():
    with pytest.raises(ValidationError):
        ModelConfig(depth=1, level_sizes=[1])


@pytest.mark.unit
def test_regression_allows_single_output():
    cfg = ModelConfig(depth=1, level_sizes=[1], output_mode="regression")
    assert cfg.level_sizes == [1]


# ── C04: Training bounds ─────────────────────────────────


@pytest.mark.unit
def test_zero_epochs_rejected():
    with pytest.raises(ValidationError):
        TrainConfig(epochs=0)


@pytest.mark.unit
def test_nonpositive_scale_rejected():
    with pytest.raises(ValidationError):
        TrainConfig(optimizer={"scales": [1.0, 0.0]})


@pytest.mark.unit
def test_scales_length_must_match_depth(raw_config_dict):
    d = deepcopy(raw_config_dict)
    d["train"]["optimizer"] = {"scales": [1.0, 2.0]}
    with pytest.raises(ValidationError):
        RunConfig(**d)


@pytest.mark.unit
def test_files_source_requires_paths():
    with pytest.raises(ValidationError):
        DataConfig(source="files", edges_path="edges.csv")


# ── C05: Seed resolution ─────────────────────────────────


@pytest.mark.unit
def test_resolved_seeds_follow_master(sample_config):
    assert sample_config.resolved_train().seed == 7
    assert sample_config.resolved_synth().seed == 7


@pytest.mark.unit
def test_explicit_synth_seed_kept(raw_config_dict):
    d = deepcopy(raw_config_dict)
    d["data"]["synth"]["seed"] = 99
    assert RunConfig(**d).resolved_synth().seed == 99


# ── C06: Invalid log level ──────────────────────────────


@pytest.mark.unit
def test_invalid_log_level():
    with pytest.raises(ValidationError):
        LoggingConfig(level="VERBOSE")


@pytest.mark.unit
def test_valid_log_level():
    lc = LoggingConfig(level="debug")
    assert lc.level == "DEBUG"


# ── C07: Loader ──────────────────────────────────────────


@pytest.mark.unit
def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "nope.yaml"))


@pytest.mark.unit
def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config(str(path))


@pytest.mark.unit
def test_load_applies_overrides(config_file, tmp_path):
    config = load_config(str(config_file), {"seed": 3, "output_dir": str(tmp_path / "x"), "bogus": None})
    assert config.seed == 3
    assert config.output_dir == str(tmp_path / "x")


@pytest.mark.unit
def test_env_overrides(config_file, monkeypatch):
    monkeypatch.setenv("LOG_LEVEL", "warning")
    monkeypatch.setenv("MLSL_SEED", "12")
    config = load_config(str(config_file))
    assert config.logging.level == "WARNING"
    assert config.seed == 12


@pytest.mark.unit
def test_load_run_report(tmp_path, sample_config):
    report = {"command": "train", "config": sample_config.model_dump(mode="json"), "metrics": {}}
    path = tmp_path / "report_train.json"
    path.write_text(json.dumps(report), encoding="utf-8")
    config = load_config(str(path))
    assert config == sample_config


@pytest.mark.unit
def test_shipped_configs_validate(monkeypatch):
    monkeypatch.delenv("LOG_LEVEL", raising=False)
    monkeypatch.delenv("MLSL_SEED", raising=False)
    default = load_config(str(CONFIG_DIR / "config.yaml"))
    deep = load_config(str(CONFIG_DIR / "mlsl3.yaml"))
    plus = load_config(str(CONFIG_DIR / "mlsl1_plus.yaml"))
    deep_plus = load_config(str(CONFIG_DIR / "mlsl3_plus.yaml"))
    assert default.model.depth == 1
    assert deep.model.level_sizes == [2, 3, 3]
    assert plus.data.synth.indicator.enabled
    assert deep_plus.model.depth == 3 and deep_plus.data.synth.indicator.enabled


# ── C08: Logger sinks ────────────────────────────────────


@pytest.mark.unit
def test_metrics_records_only_reach_metrics_file(tmp_path):
    from loguru import logger

    from src.utils.logger import setup_logger

    config = LoggingConfig(console={"enabled": False})
    setup_logger(config, tmp_path / "logs")
    logger.bind(metrics=True).info("epoch", epoch=1, mean_loss=0.5)
    logger.info("plain message")
    logger.remove()

    metrics_lines = (tmp_path / "logs" / "metrics.json").read_text(encoding="utf-8").splitlines()
    records = [json.loads(line)["record"] for line in metrics_lines]
    assert [r["message"] for r in records] == ["epoch"]
    assert records[0]["extra"]["mean_loss"] == 0.5
    main_log = (tmp_path / "logs" / "mlsl.log").read_text(encoding="utf-8")
    assert "plain message" in main_log
    assert "epoch" not in main_log
