"""Tree unfolding of a graph at a root node, and child-ordering policies.

Unfolding is breadth-first: tree-node ids are assigned in BFS order, the
root is id 0, and each node's children are created in the insertion order
of its graph out-edges. Every tree node is a fresh copy, so a graph node
reached along several walks appears several times.

Full unfolding follows every out-edge, including the one back to the
tree parent. Asymmetric unfolding drops out-edges ``(u, z)`` whose target
is the graph node of u's tree parent; the root has no parent, so a
self-loop at the root still yields one child copy.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from src.config.models import OrderKind, UnfoldMode

from .errors import ShapeError
from .graph import Graph


@dataclass(frozen=True, eq=False)
class TreeNode:
    """One node of an unfolding."""

    node_id: int
    graph_node: str
    depth: int
    parent: int | None
    edge_index: int | None  # graph edge that produced this copy
    features: np.ndarray | None  # incoming-edge features g(parent, self)


@dataclass(frozen=True, eq=False)
class UnfoldTree:
    """Depth-bounded tree of fresh node copies."""

    nodes: tuple[TreeNode, ...]
    children: tuple[tuple[int, ...], ...]
    depth_limit: int
    feature_width: int
    mode: UnfoldMode = UnfoldMode.FULL

    root: int = 0

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]

    def children_of(self, node_id: int) -> tuple[int, ...]:
        return self.children[node_id]

    def graph_path(self, node_id: int) -> tuple[str, ...]:
        """Graph nodes from the root down to ``node_id``."""
        path: list[str] = []
        current: int | None = node_id
        while current is not None:
            n = self.nodes[current]
            path.append(n.graph_node)
            current = n.parent
        return tuple(reversed(path))

    def edge_path(self, node_id: int) -> tuple[int, ...]:
        """Graph edge indices walked from the root to ``node_id``."""
        path: list[int] = []
        current = self.nodes[node_id]
        while current.parent is not None:
            path.append(current.edge_index)  # type: ignore[arg-type]
            current = self.nodes[current.parent]
        return tuple(reversed(path))


def _unfold(graph: Graph, root: str, depth: int, asymmetric: bool) -> UnfoldTree:
    graph.require_node(root)
    if depth < 1:
        raise ValueError(f"Unfolding depth must be >= 1, got {depth}")

    nodes: list[TreeNode] = [TreeNode(0, root, 0, None, None, None)]
    children: list[list[int]] = [[]]

    # BFS: nodes is the queue, head walks it
    head = 0
    while head < len(nodes):
        current = nodes[head]
        head += 1
        if current.depth >= depth:
            continue
        excluded = None
        if asymmetric and current.parent is not None:
            excluded = nodes[current.parent].graph_node
        for edge_index in graph.out_edges(current.graph_node):
            _, dst, feats = graph.edge(edge_index)
            if excluded is not None and dst == excluded:
                continue
            child_id = len(nodes)
            nodes.append(
                TreeNode(child_id, dst, current.depth + 1, current.node_id, edge_index, feats)
            )
            children.append([])
            children[current.node_id].append(child_id)

    return UnfoldTree(
        nodes=tuple(nodes),
        children=tuple(tuple(c) for c in children),
        depth_limit=depth,
        feature_width=graph.feature_width,
        mode=UnfoldMode.ASYMMETRIC if asymmetric else UnfoldMode.FULL,
    )


def unfold_full(graph: Graph, root: str, depth: int) -> UnfoldTree:
    """Full unfolding of ``graph`` at ``root`` to ``depth`` levels."""
    return _unfold(graph, root, depth, asymmetric=False)


def unfold_asymmetric(graph: Graph, root: str, depth: int) -> UnfoldTree:
    """Unfolding that never steps straight back to the tree parent."""
    return _unfold(graph, root, depth, asymmetric=True)


def unfold(graph: Graph, root: str, depth: int, mode: UnfoldMode) -> UnfoldTree:
    if mode == UnfoldMode.ASYMMETRIC:
        return unfold_asymmetric(graph, root, depth)
    return unfold_full(graph, root, depth)


# ── Child ordering ───────────────────────────────────────


@dataclass(frozen=True)
class ChildOrderPolicy:
    """How each node's children are sequenced before they reach a learner."""

    kind: OrderKind = OrderKind.AS_LOADED
    stream: str = "shuffle"
    feature_index: int = 0
    ascending: bool = True

    @classmethod
    def as_loaded(cls) -> ChildOrderPolicy:
        return cls(OrderKind.AS_LOADED)

    @classmethod
    def random_shuffle(cls, stream: str = "shuffle") -> ChildOrderPolicy:
        return cls(OrderKind.RANDOM_SHUFFLE, stream=stream)

    @classmethod
    def fixed_by_feature(cls, feature_index: int, ascending: bool = True) -> ChildOrderPolicy:
        if feature_index < 0:
            raise ShapeError(f"Order feature index must be non-negative, got {feature_index}")
        return cls(OrderKind.FIXED_BY_FEATURE, feature_index=feature_index, ascending=ascending)

    @property
    def is_deterministic(self) -> bool:
        return self.kind != OrderKind.RANDOM_SHUFFLE


def order_children(
    tree: UnfoldTree,
    policy: ChildOrderPolicy,
    rng: np.random.Generator | None = None,
) -> UnfoldTree:
    """Return a copy of ``tree`` whose child lists are permuted per ``policy``."""
    if policy.kind == OrderKind.AS_LOADED:
        return tree

    if policy.kind == OrderKind.FIXED_BY_FEATURE:
        if not 0 <= policy.feature_index < tree.feature_width:
            raise ShapeError(
                f"Order feature index {policy.feature_index} out of range for M={tree.feature_width}"
            )
        sign = 1.0 if policy.ascending else -1.0
        k = policy.feature_index
        ordered = tuple(
            tuple(sorted(kids, key=lambda c: (sign * tree.nodes[c].features[k], c)))
            for kids in tree.children
        )
        return dataclasses.replace(tree, children=ordered)

    if rng is None:
        raise ValueError("RandomShuffle ordering needs a random stream")
    shuffled: list[tuple[int, ...]] = []
    for kids in tree.children:
        if len(kids) < 2:
            shuffled.append(kids)
            continue
        perm = rng.permutation(len(kids))
        shuffled.append(tuple(kids[i] for i in perm))
    return dataclasses.replace(tree, children=tuple(shuffled))
