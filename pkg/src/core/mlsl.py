"""Multi-level sequence learners over unfolded trees.

A model of depth D holds one LSTM per tree level. Learner L_d (1-based)
summarizes the children of every depth-(d−1) node:

  - L_D reads the child edge features g(v, u_j) and has shape (M, K_D);
  - L_d, d < D, reads g(v, u_j) ⌢ f(u_j) and has shape (M + K_{d+1}, K_d).

The prediction is f(root), a K_1 vector. All instances of L_d in a tree
share its parameters but keep their own caches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.config.models import OutputMode

from .errors import ShapeError
from .lstm import (
    LearnerShape,
    LstmCache,
    LstmGrads,
    LstmParams,
    init_params,
    lstm_backward,
    lstm_forward,
)
from .unfolding import UnfoldTree


def level_shapes(depth: int, feature_width: int, level_sizes: list[int]) -> list[LearnerShape]:
    """Learner shapes for levels 1..D (index 0 is L_1)."""
    if depth < 1:
        raise ShapeError(f"Model depth must be >= 1, got {depth}")
    if len(level_sizes) != depth:
        raise ShapeError(f"Expected {depth} level sizes, got {len(level_sizes)}")
    shapes = []
    for d in range(depth):
        below = 0 if d == depth - 1 else level_sizes[d + 1]
        shapes.append(LearnerShape(feature_width + below, level_sizes[d]))
    return shapes


@dataclass(eq=False)
class MlslModel:
    learners: list[LstmParams]
    feature_width: int
    level_sizes: list[int]
    output_mode: OutputMode = OutputMode.CLASSIFICATION

    def __post_init__(self) -> None:
        expected = level_shapes(self.depth, self.feature_width, self.level_sizes)
        if len(self.learners) != self.depth:
            raise ShapeError(f"Model has {len(self.learners)} learners for depth {self.depth}")
        for d, (params, shape) in enumerate(zip(self.learners, expected)):
            if params.shape != shape:
                raise ShapeError(f"Learner L_{d + 1} has shape {params.shape}, expected {shape}")

    @property
    def depth(self) -> int:
        return len(self.level_sizes)

    @property
    def output_width(self) -> int:
        return self.level_sizes[0]

    @classmethod
    def create(
        cls,
        feature_width: int,
        level_sizes: list[int],
        output_mode: OutputMode = OutputMode.CLASSIFICATION,
        seeds: list[int] | None = None,
    ) -> MlslModel:
        """Freshly initialized model; ``seeds`` holds one init seed per level."""
        shapes = level_shapes(len(level_sizes), feature_width, list(level_sizes))
        seeds = seeds if seeds is not None else list(range(len(shapes)))
        learners = [init_params(shape, seed) for shape, seed in zip(shapes, seeds)]
        return cls(learners, feature_width, list(level_sizes), output_mode)

    def copy(self) -> MlslModel:
        return MlslModel(
            [p.copy() for p in self.learners],
            self.feature_width,
            list(self.level_sizes),
            self.output_mode,
        )


@dataclass(eq=False)
class NodeActivation:
    output: np.ndarray  # f(v)
    cache: LstmCache


@dataclass(eq=False)
class TreeActivations:
    """f(v) and the learner cache for every tree node above depth D."""

    nodes: dict[int, NodeActivation] = field(default_factory=dict)

    def output(self, node_id: int) -> np.ndarray:
        return self.nodes[node_id].output


@dataclass(eq=False)
class LevelGradients:
    """Per-level gradients: mean over learner instances, plus instance counts.

    ``mean[d] * instances[d]`` is the exact gradient of the loss w.r.t. the
    parameters of L_{d+1}.
    """

    mean: list[LstmGrads]
    instances: list[int]

    def total(self, level: int) -> LstmGrads:
        return self.mean[level].copy().scale_(float(self.instances[level]))


def _check_tree(model: MlslModel, tree: UnfoldTree) -> None:
    if tree.depth_limit != model.depth:
        raise ShapeError(f"Tree depth {tree.depth_limit} does not match model depth {model.depth}")
    if tree.feature_width != model.feature_width:
        raise ShapeError(
            f"Tree edge width {tree.feature_width} does not match model M={model.feature_width}"
        )


def mlsl_forward(model: MlslModel, tree: UnfoldTree) -> tuple[np.ndarray, TreeActivations]:
    """Bottom-up pass; returns f(root) and every instance's activations."""
    _check_tree(model, tree)
    D = model.depth
    acts = TreeActivations()

    # reverse BFS order visits children before their parents
    for node in reversed(tree.nodes):
        if node.depth >= D:
            continue
        kids = tree.children[node.node_id]
        learner = model.learners[node.depth]
        if node.depth == D - 1:
            xs = [tree.nodes[c].features for c in kids]
        else:
            xs = [np.concatenate([tree.nodes[c].features, acts.output(c)]) for c in kids]
        y, cache = lstm_forward(learner, np.array(xs) if xs else [])
        acts.nodes[node.node_id] = NodeActivation(y, cache)

    return acts.output(tree.root), acts


def softmax(y: np.ndarray) -> np.ndarray:
    z = np.exp(y - np.max(y))
    return z / z.sum()


def mlsl_loss(
    y: np.ndarray,
    label: int | np.ndarray,
    mode: OutputMode = OutputMode.CLASSIFICATION,
) -> tuple[float, np.ndarray]:
    """Loss and ∂L/∂y.

    Classification: softmax cross-entropy against class ``label``.
    Regression: ½‖y − label‖².
    """
    y = np.asarray(y, dtype=np.float64)
    if mode == OutputMode.CLASSIFICATION:
        label = int(label)
        if not 0 <= label < y.shape[0]:
            raise ValueError(f"Class label {label} out of range for {y.shape[0]} classes")
        shifted = y - np.max(y)
        log_z = np.log(np.sum(np.exp(shifted)))
        loss = float(log_z - shifted[label])
        dy = np.exp(shifted - log_z)
        dy[label] -= 1.0
        return loss, dy

    target = np.asarray(label, dtype=np.float64).reshape(-1)
    if target.shape != y.shape:
        raise ShapeError(f"Regression target width {target.shape[0]} != output width {y.shape[0]}")
    diff = y - target
    return float(0.5 * diff @ diff), diff


def mlsl_backward(
    model: MlslModel,
    tree: UnfoldTree,
    acts: TreeActivations,
    dy: np.ndarray,
) -> LevelGradients:
    """Top-down adjoint pass; per-level gradients averaged over instances."""
    _check_tree(model, tree)
    if tree.root not in acts.nodes:
        raise ShapeError("Activations do not belong to this tree")
    D, M = model.depth, model.feature_width
    sums = [LstmGrads.zeros(p.shape) for p in model.learners]
    counts = [0] * D

    adjoints: dict[int, np.ndarray] = {tree.root: np.asarray(dy, dtype=np.float64)}
    for node in tree.nodes:  # BFS order: parents first
        if node.depth >= D:
            continue
        act = acts.nodes.get(node.node_id)
        if act is None:
            raise ShapeError(f"Missing activation for tree node {node.node_id}")
        if act.cache.length != len(tree.children[node.node_id]):
            raise ShapeError(f"Activation of tree node {node.node_id} does not match its children")
        if act.cache.length == 0 or node.node_id not in adjoints:
            continue
        d = node.depth
        dxs, grads = lstm_backward(model.learners[d], act.cache, adjoints[node.node_id])
        sums[d].add_(grads)
        counts[d] += 1
        if d + 1 < D:
            # the edge-feature slice is data; only f(u_j) continues down
            for j, child in enumerate(tree.children[node.node_id]):
                adjoints[child] = dxs[j, M:]

    for d in range(D):
        if counts[d] > 0:
            sums[d].scale_(1.0 / counts[d])
    return LevelGradients(sums, counts)


def predict_tree(model: MlslModel, tree: UnfoldTree) -> tuple[int, np.ndarray]:
    """Most probable class (lowest index on ties) and the probability vector."""
    if model.output_mode != OutputMode.CLASSIFICATION:
        raise ValueError("Class prediction needs a classification model")
    y, _ = mlsl_forward(model, tree)
    probs = softmax(y)
    # np.argmax returns the first maximum
    return int(np.argmax(probs)), probs
