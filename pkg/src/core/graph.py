"""Feature-labeled directed multigraph.

Nodes are opaque string ids. Every edge carries a feature vector of the
graph's declared width M; parallel edges and self-loops are allowed and
keep their own features. Edge order is insertion order and is the
"as loaded" order unfoldings start from.

Node features are folded into the edges leading to the node, so only edge
features exist here.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from .errors import GraphError, NumericError, ShapeError


class Graph:
    """Immutable directed multigraph with fixed-width edge features."""

    def __init__(
        self,
        sources: Sequence[str],
        targets: Sequence[str],
        features: np.ndarray,
        nodes: Iterable[str] | None = None,
    ) -> None:
        features = np.array(features, dtype=np.float64)
        if features.ndim == 1 and features.size == 0:
            features = features.reshape(0, 0)
        if features.ndim != 2:
            raise ShapeError(f"Edge features must be a 2-D array, got shape {features.shape}")
        if len(sources) != len(targets) or len(sources) != features.shape[0]:
            raise ShapeError(
                f"Edge arrays disagree: {len(sources)} sources, {len(targets)} targets, "
                f"{features.shape[0]} feature rows"
            )
        if not np.all(np.isfinite(features)):
            raise NumericError("Edge features must be finite")

        # dict keeps first-seen order and gives O(1) membership
        node_index: dict[str, None] = {}
        if nodes is not None:
            for n in nodes:
                node_index[n] = None
        for s, t in zip(sources, targets):
            node_index.setdefault(s, None)
            node_index.setdefault(t, None)

        self._nodes: tuple[str, ...] = tuple(node_index)
        self._sources: tuple[str, ...] = tuple(sources)
        self._targets: tuple[str, ...] = tuple(targets)
        features.setflags(write=False)
        self._features = features

        out_edges: dict[str, list[int]] = {n: [] for n in self._nodes}
        in_degree: dict[str, int] = {n: 0 for n in self._nodes}
        for i, (s, t) in enumerate(zip(self._sources, self._targets)):
            out_edges[s].append(i)
            in_degree[t] += 1
        self._out_edges = {n: tuple(ix) for n, ix in out_edges.items()}
        self._in_degree = in_degree

    # ── Construction helpers ─────────────────────────────

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str, str, Sequence[float]]],
        feature_width: int,
        nodes: Iterable[str] | None = None,
    ) -> Graph:
        """Build from ``(src, dst, features)`` triples."""
        sources: list[str] = []
        targets: list[str] = []
        rows: list[Sequence[float]] = []
        for src, dst, feats in edges:
            if len(feats) != feature_width:
                raise ShapeError(
                    f"Edge {src}->{dst} has {len(feats)} features, expected {feature_width}"
                )
            sources.append(src)
            targets.append(dst)
            rows.append(feats)
        features = np.array(rows, dtype=np.float64).reshape(len(rows), feature_width)
        return cls(sources, targets, features, nodes=nodes)

    # ── Accessors ────────────────────────────────────────

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    @property
    def feature_width(self) -> int:
        return int(self._features.shape[1])

    @property
    def num_edges(self) -> int:
        return len(self._sources)

    @property
    def sources(self) -> tuple[str, ...]:
        return self._sources

    @property
    def targets(self) -> tuple[str, ...]:
        return self._targets

    @property
    def features(self) -> np.ndarray:
        return self._features

    def has_node(self, node: str) -> bool:
        return node in self._out_edges

    def require_node(self, node: str) -> None:
        if node not in self._out_edges:
            raise GraphError(f"Unknown node: {node!r}")

    def edge(self, index: int) -> tuple[str, str, np.ndarray]:
        return self._sources[index], self._targets[index], self._features[index]

    def out_edges(self, node: str) -> tuple[int, ...]:
        """Indices of edges leaving ``node``, in insertion order."""
        self.require_node(node)
        return self._out_edges[node]

    def out_degree(self, node: str) -> int:
        return len(self.out_edges(node))

    def in_degree(self, node: str) -> int:
        self.require_node(node)
        return self._in_degree[node]

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        return f"Graph(nodes={len(self._nodes)}, edges={self.num_edges}, M={self.feature_width})"

    # ── Derived graphs ───────────────────────────────────

    def with_reverse_edges(self) -> Graph:
        """Append a reverse copy of every edge, carrying the same features."""
        sources = self._sources + self._targets
        targets = self._targets + self._sources
        features = np.vstack([self._features, self._features])
        return Graph(sources, targets, features, nodes=self._nodes)

    def standardized(self) -> Graph:
        """Per-feature z-score; constant columns are left unchanged."""
        if self.num_edges == 0:
            return self
        mean = self._features.mean(axis=0)
        std = self._features.std(axis=0)
        constant = std == 0.0
        scaled = np.where(constant, self._features, (self._features - mean) / np.where(constant, 1.0, std))
        return Graph(self._sources, self._targets, scaled, nodes=self._nodes)


def dual_node_id(graph: Graph, index: int) -> str:
    src, dst, _ = graph.edge(index)
    return f"{src}|{dst}|{index}"


def build_dual(graph: Graph) -> Graph:
    """Dual graph: one node per edge, an edge ``(u,v) -> (v,w)`` per composable pair.

    The dual edge carries the features of the target edge ``(v,w)``; the
    source edge's features already sit on the dual edges entering it.
    """
    nodes = [dual_node_id(graph, i) for i in range(graph.num_edges)]
    sources: list[str] = []
    targets: list[str] = []
    rows: list[np.ndarray] = []
    for first in range(graph.num_edges):
        _, middle, _ = graph.edge(first)
        for second in graph.out_edges(middle):
            sources.append(nodes[first])
            targets.append(nodes[second])
            rows.append(graph.features[second])
    features = (
        np.vstack(rows) if rows else np.zeros((0, graph.feature_width), dtype=np.float64)
    )
    return Graph(sources, targets, features, nodes=nodes)
