"""Data models for labeled datasets, vote and grade matrices, synthetic truth."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.core.errors import GraphError, ShapeError
from src.core.graph import Graph

GRADE_MIN = 0.0
GRADE_MAX = 10.0


def vote_to_class(vote: int) -> int:
    """-1 -> class 0, +1 -> class 1."""
    return 1 if vote > 0 else 0


@dataclass(eq=False)
class LabeledDataset:
    """Labeled roots of a graph.

    Classification labels are class indices in ``[0, class_count)``;
    regression labels are rows of width ``regression_width``.
    """

    graph: Graph
    roots: list[str]
    labels: np.ndarray
    class_count: int | None = None
    regression_width: int | None = None

    def __post_init__(self) -> None:
        if len(self.roots) != len(self.labels):
            raise ShapeError(f"{len(self.roots)} roots but {len(self.labels)} labels")
        for root in self.roots:
            if not self.graph.has_node(root):
                raise GraphError(f"Labeled node {root!r} is not in the graph")
        if self.class_count is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.class_count):
                raise ValueError(f"Class labels must lie in [0, {self.class_count})")
        elif self.regression_width is not None:
            self.labels = np.asarray(self.labels, dtype=np.float64).reshape(-1, self.regression_width)
        else:
            raise ValueError("LabeledDataset needs class_count or regression_width")

    @property
    def is_classification(self) -> bool:
        return self.class_count is not None

    def __len__(self) -> int:
        return len(self.roots)

    def subset(self, indices: Sequence[int] | np.ndarray) -> LabeledDataset:
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            self.graph,
            [self.roots[i] for i in idx],
            self.labels[idx],
            self.class_count,
            self.regression_width,
        )

    def with_graph(self, graph: Graph) -> LabeledDataset:
        return LabeledDataset(graph, list(self.roots), self.labels, self.class_count, self.regression_width)


@dataclass(eq=False)
class VoteMatrix:
    """Sparse ±1 item–worker votes; at most one vote per pair."""

    items: list[str]
    workers: list[str]
    item_idx: np.ndarray
    worker_idx: np.ndarray
    votes: np.ndarray

    def __post_init__(self) -> None:
        self.item_idx = np.asarray(self.item_idx, dtype=np.int64)
        self.worker_idx = np.asarray(self.worker_idx, dtype=np.int64)
        self.votes = np.asarray(self.votes, dtype=np.int64)
        if not (len(self.item_idx) == len(self.worker_idx) == len(self.votes)):
            raise ShapeError("Vote arrays must have equal length")
        if not np.all(np.abs(self.votes) == 1):
            raise ValueError("Votes must be -1 or +1")
        pairs = self.item_idx * max(len(self.workers), 1) + self.worker_idx
        if len(np.unique(pairs)) != len(pairs):
            raise ValueError("At most one vote per (item, worker) pair is allowed")
        if np.any(np.bincount(self.item_idx, minlength=len(self.items)) == 0):
            raise ValueError("Every item needs at least one vote")

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def n_workers(self) -> int:
        return len(self.workers)

    @classmethod
    def from_triples(cls, triples: Sequence[tuple[str, str, int]]) -> VoteMatrix:
        items: dict[str, int] = {}
        workers: dict[str, int] = {}
        ii, ww, vv = [], [], []
        for item, worker, vote in triples:
            ii.append(items.setdefault(item, len(items)))
            ww.append(workers.setdefault(worker, len(workers)))
            vv.append(int(vote))
        return cls(list(items), list(workers), np.array(ii), np.array(ww), np.array(vv))

    @classmethod
    def from_graph(cls, graph: Graph, vote_feature: int = 0) -> VoteMatrix:
        """Edges item -> worker with the vote in column ``vote_feature``."""
        if vote_feature >= graph.feature_width:
            raise ShapeError(f"Vote feature {vote_feature} out of range for M={graph.feature_width}")
        column = graph.features[:, vote_feature]
        if not np.all(np.isin(column, (-1.0, 1.0))):
            raise ValueError("Edge data is not a ±1 vote matrix")
        return cls.from_triples(
            [(s, t, int(v)) for s, t, v in zip(graph.sources, graph.targets, column)]
        )

    def item_index(self) -> dict[str, int]:
        return {item: i for i, item in enumerate(self.items)}


@dataclass(eq=False)
class GradeMatrix:
    """Sparse real grades in [0, 10] given by workers to items."""

    items: list[str]
    workers: list[str]
    item_idx: np.ndarray
    worker_idx: np.ndarray
    grades: np.ndarray

    def __post_init__(self) -> None:
        self.item_idx = np.asarray(self.item_idx, dtype=np.int64)
        self.worker_idx = np.asarray(self.worker_idx, dtype=np.int64)
        self.grades = np.asarray(self.grades, dtype=np.float64)
        if not (len(self.item_idx) == len(self.worker_idx) == len(self.grades)):
            raise ShapeError("Grade arrays must have equal length")
        if np.any(self.grades < GRADE_MIN) or np.any(self.grades > GRADE_MAX):
            raise ValueError(f"Grades must lie in [{GRADE_MIN:g}, {GRADE_MAX:g}]")

    @property
    def n_items(self) -> int:
        return len(self.items)

    @classmethod
    def from_triples(
        cls,
        triples: Sequence[tuple[str, str, float]],
        items: Sequence[str] | None = None,
    ) -> GradeMatrix:
        item_map: dict[str, int] = {i: n for n, i in enumerate(items or [])}
        workers: dict[str, int] = {}
        ii, ww, gg = [], [], []
        for item, worker, grade in triples:
            ii.append(item_map.setdefault(item, len(item_map)))
            ww.append(workers.setdefault(worker, len(workers)))
            gg.append(float(grade))
        return cls(list(item_map), list(workers), np.array(ii), np.array(ww), np.array(gg))

    @classmethod
    def from_graph(cls, graph: Graph, grade_feature: int = 0) -> GradeMatrix:
        if grade_feature >= graph.feature_width:
            raise ShapeError(f"Grade feature {grade_feature} out of range for M={graph.feature_width}")
        column = graph.features[:, grade_feature]
        return cls.from_triples(list(zip(graph.sources, graph.targets, column)))

    def item_index(self) -> dict[str, int]:
        return {item: i for i, item in enumerate(self.items)}


@dataclass(eq=False)
class SynthTruth:
    """Hidden state of a synthetic crowdsourcing instance."""

    item_labels: np.ndarray  # ±1 per item
    reliable: np.ndarray  # bool per user
    indicator: np.ndarray | None = None  # bool per user, when enabled
