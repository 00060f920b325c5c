"""Tests for the spammer-hammer generator and the train/test split (src/data/synth.py)."""

from __future__ import annotations

import numpy as np
import pytest

from src.config.models import IndicatorSpec, SynthSpec
from src.data.synth import gen_spammer_hammer, split_items
from src.utils.seeding import SeedStreams

# ── S01: Generator ───────────────────────────────────────


@pytest.mark.unit
def test_graph_shape():
    graph, votes, truth, dataset = gen_spammer_hammer(SynthSpec(seed=1))
    assert graph.num_edges == 9000
    assert len(graph.nodes) == 6000
    assert graph.feature_width == 1
    assert len(dataset) == 3000
    assert truth.indicator is None
    assert set(np.unique(votes.votes)) <= {-1, 1}


@pytest.mark.unit
def test_voters_are_distinct_per_item(small_synth):
    graph, _, _, _ = small_synth
    for item in graph.nodes[:60]:
        targets = [graph.edge(e)[1] for e in graph.out_edges(item)]
        assert len(targets) == 3
        assert len(set(targets)) == 3


@pytest.mark.unit
def test_reliable_fraction():
    _, _, truth, _ = gen_spammer_hammer(SynthSpec(seed=2))
    assert truth.reliable.mean() == pytest.approx(0.6, abs=0.03)


@pytest.mark.unit
def test_reliable_users_vote_truthfully():
    _, votes, truth, _ = gen_spammer_hammer(SynthSpec(n_items=500, n_users=500, seed=3))
    mask = truth.reliable[votes.worker_idx]
    assert np.array_equal(votes.votes[mask], truth.item_labels[votes.item_idx[mask]])
    spam = votes.votes[~mask] == truth.item_labels[votes.item_idx[~mask]]
    assert spam.mean() == pytest.approx(0.5, abs=0.05)


@pytest.mark.unit
def test_all_reliable_gives_clean_votes():
    _, votes, truth, _ = gen_spammer_hammer(SynthSpec(n_items=100, n_users=100, p_reliable=1.0, seed=4))
    assert np.array_equal(votes.votes, truth.item_labels[votes.item_idx])


@pytest.mark.unit
def test_class_balance_extremes():
    _, _, truth, dataset = gen_spammer_hammer(SynthSpec(n_items=50, n_users=50, class_balance=1.0, seed=5))
    assert np.all(truth.item_labels == 1)
    assert np.all(dataset.labels == 1)
    _, _, truth, _ = gen_spammer_hammer(SynthSpec(n_items=50, n_users=50, class_balance=0.0, seed=5))
    assert np.all(truth.item_labels == -1)


@pytest.mark.unit
def test_indicator_statistics():
    spec = SynthSpec(n_users=20_000, n_items=100, seed=6, indicator=IndicatorSpec(enabled=True))
    graph, votes, truth, _ = gen_spammer_hammer(spec)
    assert graph.feature_width == 2
    assert truth.indicator[truth.reliable].mean() == pytest.approx(0.9, abs=0.02)
    assert truth.indicator[~truth.reliable].mean() == pytest.approx(0.4, abs=0.02)
    # every edge of a user carries that user's bit
    assert np.array_equal(graph.features[:, 1], truth.indicator[votes.worker_idx].astype(float))


@pytest.mark.unit
def test_generator_is_seeded():
    a = gen_spammer_hammer(SynthSpec(n_items=80, n_users=80, seed=9))
    b = gen_spammer_hammer(SynthSpec(n_items=80, n_users=80, seed=9))
    c = gen_spammer_hammer(SynthSpec(n_items=80, n_users=80, seed=10))
    assert np.array_equal(a[0].features, b[0].features)
    assert a[0].targets == b[0].targets
    assert not (np.array_equal(a[0].features, c[0].features) and a[0].targets == c[0].targets)


@pytest.mark.unit
def test_too_many_votes_rejected():
    with pytest.raises(ValueError):
        SynthSpec(n_items=5, n_users=2, votes_per_item=3)


# ── S02: Split ───────────────────────────────────────────


@pytest.mark.unit
def test_split_partitions_roots(small_synth):
    _, _, _, dataset = small_synth
    train, test = split_items(dataset, 20, SeedStreams(1).rng("split"))
    assert len(train) == 20 and len(test) == 40
    assert not set(train.roots) & set(test.roots)
    assert set(train.roots) | set(test.roots) == set(dataset.roots)
    label_of = dict(zip(dataset.roots, dataset.labels))
    assert all(label_of[r] == label for r, label in zip(test.roots, test.labels))


@pytest.mark.unit
def test_split_is_seeded(small_synth):
    _, _, _, dataset = small_synth
    first, _ = split_items(dataset, 10, SeedStreams(4).rng("split"))
    second, _ = split_items(dataset, 10, SeedStreams(4).rng("split"))
    assert first.roots == second.roots


@pytest.mark.unit
def test_split_bounds(small_synth):
    _, _, _, dataset = small_synth
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        split_items(dataset, 60, rng)
    with pytest.raises(ValueError):
        split_items(dataset, 0, rng)
