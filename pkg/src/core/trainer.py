"""Training loop, prediction and dataset evaluation for MLSL models.

One training sample is one labeled root: unfold, order children, forward,
loss, backward, then one AdaDelta step per level with the instance-mean
gradient. There is no cross-sample batching.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.config.models import (
    ChildOrderConfig,
    OrderKind,
    OutputMode,
    TrainConfig,
    VisitOrder,
)
from src.data.models import LabeledDataset
from src.utils.seeding import SeedStreams

from .graph import Graph
from .metrics import accuracy, average_recall
from .mlsl import MlslModel, mlsl_backward, mlsl_forward, mlsl_loss, predict_tree
from .optimizer import AdaDeltaState, adadelta_update
from .unfolding import ChildOrderPolicy, UnfoldTree, order_children, unfold

GradientHook = Callable[[np.ndarray], np.ndarray]


@dataclass
class EpochRecord:
    """One row of training history; eval cells are None when not evaluated."""

    epoch: int
    mean_loss: float
    eval_accuracy: float | None = None
    eval_avg_recall: float | None = None


def training_policy(cfg: ChildOrderConfig) -> ChildOrderPolicy:
    if cfg.policy == OrderKind.RANDOM_SHUFFLE:
        return ChildOrderPolicy.random_shuffle()
    if cfg.policy == OrderKind.FIXED_BY_FEATURE:
        return ChildOrderPolicy.fixed_by_feature(cfg.feature_index, cfg.ascending)
    return ChildOrderPolicy.as_loaded()


def prediction_policy(cfg: ChildOrderConfig) -> ChildOrderPolicy:
    """Deterministic ordering used at prediction time.

    FixedByFeature when configured, AsLoaded otherwise (also when training
    shuffles).
    """
    if cfg.policy == OrderKind.FIXED_BY_FEATURE:
        return ChildOrderPolicy.fixed_by_feature(cfg.feature_index, cfg.ascending)
    return ChildOrderPolicy.as_loaded()


def _prediction_tree(model: MlslModel, graph: Graph, root: str, cfg: TrainConfig) -> UnfoldTree:
    tree = unfold(graph, root, model.depth, cfg.unfolding)
    return order_children(tree, prediction_policy(cfg.child_order))


def predict_label(
    model: MlslModel, graph: Graph, root: str, cfg: TrainConfig
) -> tuple[int, np.ndarray]:
    """Class index (ties go to the lowest index) and the probability vector."""
    return predict_tree(model, _prediction_tree(model, graph, root, cfg))


def evaluate_dataset(
    model: MlslModel,
    dataset: LabeledDataset,
    cfg: TrainConfig,
    trees: dict[str, UnfoldTree] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Predict every root of ``dataset`` with deterministic child order.

    Classification returns (class indices, probability rows); regression
    returns the raw output rows twice. ``trees`` optionally supplies
    cached base unfoldings by root.
    """
    policy = prediction_policy(cfg.child_order)
    preds, outputs = [], []
    for root in dataset.roots:
        base = trees.get(root) if trees is not None else None
        if base is None:
            base = unfold(dataset.graph, root, model.depth, cfg.unfolding)
        tree = order_children(base, policy)
        if model.output_mode == OutputMode.CLASSIFICATION:
            label, probs = predict_tree(model, tree)
            preds.append(label)
            outputs.append(probs)
        else:
            y, _ = mlsl_forward(model, tree)
            preds.append(y)
            outputs.append(y)
    if model.output_mode == OutputMode.CLASSIFICATION:
        return np.asarray(preds, dtype=np.int64), np.asarray(outputs)
    return np.asarray(preds), np.asarray(outputs)


class Trainer:
    """Owns a model, its per-level optimizer states and the random streams.

    Base unfoldings are cached per root; the configured child order is
    applied on every visit so RandomShuffle re-permutes each time.
    """

    def __init__(
        self,
        model: MlslModel,
        cfg: TrainConfig,
        streams: SeedStreams | None = None,
        gradient_hook: GradientHook | None = None,
    ) -> None:
        self.model = model
        self.cfg = cfg
        self.streams = streams or SeedStreams(cfg.seed)
        self.gradient_hook = gradient_hook
        self.optimizers = [
            AdaDeltaState.fresh(
                params.shape,
                rho=cfg.optimizer.rho,
                epsilon=cfg.optimizer.epsilon,
                scale=cfg.optimizer.scale_for(level),
            )
            for level, params in enumerate(model.learners)
        ]
        self.policy = training_policy(cfg.child_order)
        self._shuffle_rng = self.streams.rng(self.policy.stream)
        self._visit_rng = self.streams.rng("visit")
        self._graph: Graph | None = None
        self._trees: dict[str, UnfoldTree] = {}
        self.steps = 0

    # ── Unfolding cache ──────────────────────────────────

    def base_tree(self, graph: Graph, root: str) -> UnfoldTree:
        if graph is not self._graph:
            self._graph = graph
            self._trees = {}
        tree = self._trees.get(root)
        if tree is None:
            tree = unfold(graph, root, self.model.depth, self.cfg.unfolding)
            self._trees[root] = tree
        return tree

    # ── Training ─────────────────────────────────────────

    def train_step(self, graph: Graph, root: str, label: int | np.ndarray) -> float:
        """One update on one labeled root; returns the pre-update loss."""
        tree = order_children(self.base_tree(graph, root), self.policy, self._shuffle_rng)
        y, acts = mlsl_forward(self.model, tree)
        loss, dy = mlsl_loss(y, label, self.model.output_mode)
        if self.gradient_hook is not None:
            dy = self.gradient_hook(dy)
        grads = mlsl_backward(self.model, tree, acts, dy)
        for level, state in enumerate(self.optimizers):
            adadelta_update(state, self.model.learners[level], grads.mean[level])
        self.steps += 1
        return loss

    def _visit_order(self, n: int) -> np.ndarray:
        if self.cfg.visit_order == VisitOrder.UNIFORM_RANDOM:
            return self._visit_rng.integers(0, n, size=n)
        return np.arange(n)

    def train(
        self,
        dataset: LabeledDataset,
        eval_set: LabeledDataset | None = None,
        epochs: int | None = None,
    ) -> list[EpochRecord]:
        """Run ``epochs`` passes over ``dataset`` (defaults to the config).

        The held-out set is evaluated every ``eval_every`` epochs and after
        the last epoch.
        """
        epochs = self.cfg.epochs if epochs is None else epochs
        if epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {epochs}")
        if len(dataset) == 0:
            raise ValueError("Cannot train on an empty dataset")
        if dataset.is_classification != (self.model.output_mode == OutputMode.CLASSIFICATION):
            raise ValueError(
                f"Dataset labels do not match model output mode {self.model.output_mode}"
            )

        logger.info(
            f"Training depth-{self.model.depth} MLSL on {len(dataset)} roots: "
            f"epochs={epochs} unfolding={self.cfg.unfolding} "
            f"order={self.policy.kind} visit={self.cfg.visit_order}"
        )
        history: list[EpochRecord] = []
        for epoch in range(1, epochs + 1):
            losses = [
                self.train_step(dataset.graph, dataset.roots[i], dataset.labels[i])
                for i in self._visit_order(len(dataset))
            ]
            record = EpochRecord(epoch, float(np.mean(losses)))

            if (
                eval_set is not None
                and len(eval_set) > 0
                and eval_set.is_classification
                and (epoch % self.cfg.eval_every == 0 or epoch == epochs)
            ):
                preds, _ = self.evaluate(eval_set)
                record.eval_accuracy = accuracy(eval_set.labels, preds)
                record.eval_avg_recall = average_recall(
                    eval_set.labels, preds, eval_set.class_count or self.model.output_width
                )

            history.append(record)
            logger.bind(metrics=True).info(
                "epoch",
                epoch=record.epoch,
                mean_loss=record.mean_loss,
                eval_accuracy=record.eval_accuracy,
                eval_avg_recall=record.eval_avg_recall,
            )
            logger.info(
                f"Epoch {epoch}/{epochs}: loss={record.mean_loss:.4f}"
                + (f" acc={record.eval_accuracy:.4f}" if record.eval_accuracy is not None else "")
            )
        return history

    def evaluate(self, dataset: LabeledDataset) -> tuple[np.ndarray, np.ndarray]:
        trees = {root: self.base_tree(dataset.graph, root) for root in dataset.roots}
        return evaluate_dataset(self.model, dataset, self.cfg, trees)


def train(
    model: MlslModel,
    dataset: LabeledDataset,
    cfg: TrainConfig,
    eval_set: LabeledDataset | None = None,
    streams: SeedStreams | None = None,
) -> tuple[MlslModel, list[EpochRecord]]:
    trainer = Trainer(model, cfg, streams)
    history = trainer.train(dataset, eval_set)
    return trainer.model, history
