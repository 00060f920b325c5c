"""Synthetic spammer-hammer crowdsourcing data.

Items carry a hidden ±1 label; users are reliable ("hammers", always
report the truth) or unreliable ("spammers", report ±1 with probability
0.5 each). Each item is voted on by ``votes_per_item`` distinct users
drawn uniformly. An optional observable indicator bit per user is
correlated with reliability and is appended to every vote edge of that
user.

Graph form: nodes ``i<k>`` for items and ``u<k>`` for users, one edge
item -> user per vote with features ``[vote]`` or ``[vote, indicator]``.
"""

from __future__ import annotations

import numpy as np
from loguru import logger

from src.config.models import SynthSpec
from src.core.graph import Graph

from .models import LabeledDataset, SynthTruth, VoteMatrix, vote_to_class


def item_id(i: int) -> str:
    return f"i{i}"


def user_id(j: int) -> str:
    return f"u{j}"


def gen_spammer_hammer(
    spec: SynthSpec, rng: np.random.Generator | None = None
) -> tuple[Graph, VoteMatrix, SynthTruth, LabeledDataset]:
    """Draw one instance; ``rng`` defaults to a generator seeded by ``spec.seed``."""
    if spec.votes_per_item > spec.n_users:
        raise ValueError(
            f"votes_per_item ({spec.votes_per_item}) must be <= n_users ({spec.n_users})"
        )
    if rng is None:
        rng = np.random.default_rng(spec.seed if spec.seed is not None else 0)

    labels = np.where(rng.random(spec.n_items) < spec.class_balance, 1, -1)
    reliable = rng.random(spec.n_users) < spec.p_reliable

    indicator = None
    if spec.indicator.enabled:
        p_true = np.where(
            reliable,
            spec.indicator.p_true_given_reliable,
            spec.indicator.p_true_given_unreliable,
        )
        indicator = rng.random(spec.n_users) < p_true

    k = spec.votes_per_item
    voters = np.stack(
        [rng.choice(spec.n_users, size=k, replace=False) for _ in range(spec.n_items)]
    )
    item_idx = np.repeat(np.arange(spec.n_items), k)
    worker_idx = voters.reshape(-1)
    random_votes = np.where(rng.random(item_idx.shape[0]) < 0.5, 1, -1)
    votes = np.where(reliable[worker_idx], labels[item_idx], random_votes)

    columns = [votes.astype(np.float64)]
    if indicator is not None:
        columns.append(indicator[worker_idx].astype(np.float64))
    features = np.column_stack(columns)

    items = [item_id(i) for i in range(spec.n_items)]
    users = [user_id(j) for j in range(spec.n_users)]
    graph = Graph(
        [items[i] for i in item_idx],
        [users[j] for j in worker_idx],
        features,
        nodes=items + users,
    )
    vote_matrix = VoteMatrix(items, users, item_idx, worker_idx, votes)
    truth = SynthTruth(labels, reliable, indicator)
    dataset = LabeledDataset(
        graph,
        list(items),
        np.array([vote_to_class(v) for v in labels]),
        class_count=2,
    )

    logger.info(
        f"Generated spammer-hammer instance: {spec.n_items} items, {spec.n_users} users, "
        f"{graph.num_edges} votes, reliable={reliable.mean():.3f}, "
        f"indicator={'on' if indicator is not None else 'off'}"
    )
    return graph, vote_matrix, truth, dataset


def split_items(
    dataset: LabeledDataset, n_train: int, rng: np.random.Generator
) -> tuple[LabeledDataset, LabeledDataset]:
    """Seeded uniform split into ``n_train`` training roots and the rest."""
    if n_train >= len(dataset):
        raise ValueError(f"n_train ({n_train}) must be smaller than the dataset ({len(dataset)})")
    if n_train < 1:
        raise ValueError(f"n_train must be positive, got {n_train}")
    perm = rng.permutation(len(dataset))
    return dataset.subset(perm[:n_train]), dataset.subset(perm[n_train:])
