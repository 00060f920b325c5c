"""Replication runs on the default crowdsourcing setup.

The full-scale checks are marked ``slow`` and skipped by default; run
them with ``pytest -m slow``. The small smoke run always executes.
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np
import pytest
import yaml

from src.config.models import RunConfig
from src.core.experiment import Experiment

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"
SEEDS = [0, 1, 2, 3, 4]
KOS_GAP = (
    "KOS measures about 0.853 on this generator (k_max 1 to 20, empty "
    "leave-one-out sums kept or zeroed all give 0.828 to 0.855); the 0.8016 "
    "reference is not reproduced"
)
PLUS_GAP = (
    "a depth-1 learner sees only the three (vote, indicator) edges of an item; "
    "the Bayes-optimal rule on that input scores about 0.9136, below 0.93 and "
    "below EM, which pools each worker's votes across items"
)


def shipped_config(name: str, seed: int, out: Path) -> RunConfig:
    raw = yaml.safe_load((CONFIG_DIR / name).read_text(encoding="utf-8"))
    raw["seed"] = seed
    raw["output_dir"] = str(out / f"{Path(name).stem}_{seed}")
    raw["logging"]["console"]["enabled"] = False
    return RunConfig(**raw)


def train_accuracy(name: str, seed: int, out: Path) -> float:
    return Experiment(shipped_config(name, seed, out)).run_train().metrics["accuracy"]


def baseline_accuracy(which: str, seed: int, out: Path, name: str = "config.yaml") -> float:
    return Experiment(shipped_config(name, seed, out)).run_baseline(which).metrics["accuracy"]


# ── A01: Smoke run ───────────────────────────────────────


@pytest.mark.integration
def test_small_multigraph_train_and_eval(raw_config_dict):
    raw_config_dict["data"]["synth"].update(n_items=100, n_users=100)
    raw_config_dict["data"]["n_train"] = 50
    raw_config_dict["model"] = {"depth": 2, "level_sizes": [2, 3]}
    config = RunConfig(**raw_config_dict)

    start = time.perf_counter()
    trained = Experiment(config).run_train()
    evaluated = Experiment(config).run_eval(trained.artifacts["model"])
    assert time.perf_counter() - start < 60
    assert evaluated.metrics["accuracy"] == trained.metrics["accuracy"]
    assert evaluated.metrics["n_samples"] == 50


# ── A02: Baselines ───────────────────────────────────────



@pytest.mark.slow
def test_em_accuracy(tmp_path):
    em = np.mean([baseline_accuracy("em", s, tmp_path) for s in SEEDS])
    assert em == pytest.approx(0.9136, abs=0.02)


@pytest.mark.slow
def test_kos_accuracy_on_this_generator(tmp_path):
    kos = [baseline_accuracy("kos", s, tmp_path) for s in SEEDS]
    em = [baseline_accuracy("em", s, tmp_path) for s in SEEDS]
    assert 0.83 <= np.mean(kos) <= 0.87
    assert np.mean(kos) < np.mean(em)


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason=KOS_GAP)
def test_kos_reference_accuracy(tmp_path):
    kos = np.mean([baseline_accuracy("kos", s, tmp_path) for s in SEEDS])
    assert kos == pytest.approx(0.8016, abs=0.03)


# ── A03: MLSL ────────────────────────────────────────────


@pytest.mark.slow
def test_one_level_accuracy(tmp_path):
    assert np.mean([train_accuracy("config.yaml", s, tmp_path) for s in SEEDS]) >= 0.86


@pytest.mark.slow
def test_three_level_accuracy(tmp_path):
    assert np.mean([train_accuracy("mlsl3.yaml", s, tmp_path) for s in SEEDS]) >= 0.87


@pytest.mark.slow
def test_indicator_feature_helps_depth_one_learner(tmp_path):
    plus = [train_accuracy("mlsl1_plus.yaml", s, tmp_path) for s in SEEDS]
    plain = [train_accuracy("config.yaml", s, tmp_path) for s in SEEDS]
    assert np.mean(plus) >= 0.90
    assert np.mean(plus) > np.mean(plain)


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason=PLUS_GAP)
def test_indicator_feature_beats_em(tmp_path):
    plus = [train_accuracy("mlsl1_plus.yaml", s, tmp_path) for s in SEEDS]
    em = [baseline_accuracy("em", s, tmp_path, "mlsl1_plus.yaml") for s in SEEDS]
    assert np.mean(plus) >= 0.93
    for p, e in zip(plus, em):
        assert p > e
