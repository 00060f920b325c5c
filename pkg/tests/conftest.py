"""Shared fixtures for all test modules."""

from __future__ import annotations

from typing import Any

import numpy as np
import pytest
import yaml

# ── Config fixtures ──────────────────────────────────────


@pytest.fixture
def raw_config_dict(tmp_path) -> dict[str, Any]:
    """Small, fast, valid config dict for constructing RunConfig."""
    return {
        "seed": 7,
        "output_dir": str(tmp_path / "run"),
        "data": {
            "source": "synthetic",
            "bidirectional": True,
            "n_train": 20,
            "synth": {
                "n_items": 60,
                "n_users": 60,
                "p_reliable": 0.6,
                "votes_per_item": 3,
            },
        },
        "model": {"depth": 1, "level_sizes": [2]},
        "train": {
            "unfolding": "asymmetric",
            "child_order": {"policy": "random_shuffle"},
            "epochs": 2,
            "eval_every": 1,
        },
        "baseline": {"name": "em"},
        "logging": {
            "level": "DEBUG",
            "console": {"enabled": False},
        },
    }


@pytest.fixture
def sample_config(raw_config_dict):
    """Build a validated RunConfig."""
    from src.config.models import RunConfig

    return RunConfig(**raw_config_dict)


@pytest.fixture
def config_file(tmp_path, raw_config_dict):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(raw_config_dict), encoding="utf-8")
    return path


# ── Graph fixtures ───────────────────────────────────────


@pytest.fixture
def two_cycle():
    from src.core.graph import Graph

    return Graph(["a", "b"], ["b", "a"], [[1.0], [2.0]])


@pytest.fixture
def triangle():
    """Complete directed triangle on a, b, c (6 edges)."""
    from src.core.graph import Graph

    pairs = [("a", "b"), ("a", "c"), ("b", "a"), ("b", "c"), ("c", "a"), ("c", "b")]
    return Graph(
        [s for s, _ in pairs],
        [t for _, t in pairs],
        [[float(i), float(i) / 10] for i in range(len(pairs))],
    )


def random_graph(rng: np.random.Generator, max_nodes: int = 8, max_edges: int = 16, width: int = 2):
    """Random multigraph with self-loops and parallel edges allowed."""
    from src.core.graph import Graph

    n_nodes = int(rng.integers(1, max_nodes + 1))
    n_edges = int(rng.integers(0, max_edges + 1))
    names = [f"n{i}" for i in range(n_nodes)]
    src = [names[i] for i in rng.integers(0, n_nodes, size=n_edges)]
    dst = [names[i] for i in rng.integers(0, n_nodes, size=n_edges)]
    feats = rng.normal(size=(n_edges, width))
    return Graph(src, dst, feats, nodes=names)


@pytest.fixture
def graph_factory():
    return random_graph


# ── Synthetic data fixtures ──────────────────────────────


@pytest.fixture
def small_synth():
    """(graph, votes, truth, dataset) for a 60x60 seeded instance."""
    from src.config.models import SynthSpec
    from src.data.synth import gen_spammer_hammer

    return gen_spammer_hammer(SynthSpec(n_items=60, n_users=60, seed=11))
