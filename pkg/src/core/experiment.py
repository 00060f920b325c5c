"""Experiment orchestration shared by the CLI commands.

An ``Experiment`` turns a validated ``RunConfig`` into data (synthetic or
from files), a train/test split, a model, baseline runs and the artifacts
each command writes under ``output_dir``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from loguru import logger

from src.config.models import BaselineName, DataSource, OutputMode, RunConfig
from src.data import export
from src.data.io import load_graph, load_labels, load_model, save_graph, save_labels, save_model, save_truth
from src.data.models import GradeMatrix, LabeledDataset, SynthTruth, VoteMatrix, vote_to_class
from src.data.synth import gen_spammer_hammer, split_items
from src.utils.seeding import SeedStreams

from . import baselines
from .errors import ShapeError
from .graph import Graph
from .metrics import regression_summary, summarize
from .mlsl import MlslModel
from .trainer import EpochRecord, Trainer, evaluate_dataset

GRADE_CLASSES = 11


@dataclass(eq=False)
class PreparedData:
    """Raw graph for baselines, model graph for MLSL, and the split."""

    graph: Graph
    model_graph: Graph
    dataset: LabeledDataset
    train: LabeledDataset
    test: LabeledDataset
    truth: SynthTruth | None = None


@dataclass(eq=False)
class RunResult:
    command: str
    metrics: dict[str, Any]
    artifacts: dict[str, str] = field(default_factory=dict)
    history: list[EpochRecord] = field(default_factory=list)
    wall_time_s: float = 0.0


class Experiment:
    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.streams = SeedStreams(config.seed)
        self.output_dir = Path(config.output_dir)

    # ── Data ─────────────────────────────────────────────

    def generate(self) -> tuple[Graph, VoteMatrix, SynthTruth, LabeledDataset]:
        spec = self.config.resolved_synth()
        return gen_spammer_hammer(spec, SeedStreams(spec.seed).rng("synth"))

    def load_dataset(self) -> tuple[Graph, LabeledDataset, SynthTruth | None]:
        data = self.config.data
        if data.source == DataSource.SYNTHETIC:
            graph, _, truth, dataset = self.generate()
            return graph, dataset, truth

        graph = load_graph(data.edges_path)
        mode = self.config.model.output_mode
        class_count = self.config.model.level_sizes[0] if mode == OutputMode.CLASSIFICATION else None
        dataset = load_labels(data.labels_path, graph, mode, class_count)
        return graph, dataset, None

    def prepare(self) -> PreparedData:
        graph, dataset, truth = self.load_dataset()
        model_graph = graph
        if self.config.data.bidirectional:
            model_graph = model_graph.with_reverse_edges()
        if self.config.data.standardize:
            model_graph = model_graph.standardized()

        model_cfg = self.config.model
        if dataset.is_classification and dataset.class_count != model_cfg.level_sizes[0]:
            raise ShapeError(
                f"Data has {dataset.class_count} classes but level_sizes[0]={model_cfg.level_sizes[0]}"
            )
        if not dataset.is_classification and dataset.regression_width != model_cfg.level_sizes[0]:
            raise ShapeError(
                f"Regression width {dataset.regression_width} != level_sizes[0]={model_cfg.level_sizes[0]}"
            )

        full = dataset.with_graph(model_graph)
        train, test = split_items(full, self.config.data.n_train, self.streams.rng("split"))
        logger.info(
            f"Prepared data: {len(graph.nodes)} nodes, {model_graph.num_edges} model edges, "
            f"train={len(train)} test={len(test)}"
        )
        return PreparedData(graph, model_graph, full, train, test, truth)

    # ── Model ────────────────────────────────────────────

    def build_model(self, feature_width: int) -> MlslModel:
        depth = self.config.model.depth
        seeds = [int(s) for s in self.streams.rng("init").integers(0, 2**32, size=depth)]
        return MlslModel.create(
            feature_width, list(self.config.model.level_sizes), self.config.model.output_mode, seeds
        )

    def _score(
        self, model: MlslModel, test: LabeledDataset, trainer: Trainer | None = None
    ) -> tuple[dict[str, Any], np.ndarray, np.ndarray]:
        if trainer is not None:
            preds, outputs = trainer.evaluate(test)
        else:
            preds, outputs = evaluate_dataset(model, test, self.config.resolved_train())
        if test.is_classification:
            return summarize(test.labels, preds, test.class_count), preds, outputs
        return regression_summary(test.labels, outputs), preds, outputs

    def _write_predictions(self, test: LabeledDataset, preds: np.ndarray, outputs: np.ndarray, name: str) -> Path:
        path = self.output_dir / name
        if test.is_classification:
            return export.write_predictions(test.roots, test.labels, preds, path, outputs)
        return export.write_predictions(test.roots, test.labels[:, 0], outputs[:, 0], path)

    # ── Commands ─────────────────────────────────────────

    def run_synth(self) -> RunResult:
        start = time.perf_counter()
        graph, votes, truth, dataset = self.generate()
        artifacts = {
            "edges": str(save_graph(graph, self.output_dir / "edges.csv")),
            "labels": str(save_labels(dataset, self.output_dir / "labels.csv")),
            "truth": str(save_truth(votes.items, votes.workers, truth, self.output_dir / "truth.csv")),
        }
        metrics = {"n_edges": graph.num_edges, "n_labels": len(dataset)}
        return self._finish("synth", start, metrics, artifacts)

    def run_train(self) -> RunResult:
        start = time.perf_counter()
        prepared = self.prepare()
        model = self.build_model(prepared.model_graph.feature_width)
        trainer = Trainer(model, self.config.resolved_train(), self.streams)
        history = trainer.train(prepared.train, prepared.test)

        summary, preds, outputs = self._score(model, prepared.test, trainer)
        artifacts = {
            "model": str(save_model(model, self.output_dir / "model.json")),
            "history": str(export.write_history(history, self.output_dir / "history.csv")),
            "metrics": str(export.write_metrics(summary, "mlsl", self.output_dir / "metrics.csv")),
            "predictions": str(self._write_predictions(prepared.test, preds, outputs, "predictions.csv")),
        }
        result = self._finish("train", start, summary, artifacts)
        result.history = history
        return result

    def run_eval(self, model_path: str | Path) -> RunResult:
        start = time.perf_counter()
        prepared = self.prepare()
        model = load_model(model_path, expected_feature_width=prepared.model_graph.feature_width)
        if model.depth != self.config.model.depth:
            raise ShapeError(f"Model depth {model.depth} != configured depth {self.config.model.depth}")
        summary, preds, outputs = self._score(model, prepared.test)
        artifacts = {
            "metrics": str(export.write_metrics(summary, "mlsl", self.output_dir / "metrics_eval.csv")),
            "predictions": str(self._write_predictions(prepared.test, preds, outputs, "predictions_eval.csv")),
        }
        return self._finish("eval", start, summary, artifacts)

    def baseline_predictions(self, which: BaselineName, prepared: PreparedData) -> np.ndarray:
        """Class predictions of baseline ``which`` for the test roots."""
        cfg = self.config.baseline
        test = prepared.test
        if which == BaselineName.PROPORTIONAL:
            return baselines.proportional_guess(
                prepared.train.labels, len(test), self.streams.rng("baseline")
            )

        if which in (BaselineName.AVG, BaselineName.EM_GRADES):
            grades = GradeMatrix.from_graph(prepared.graph, cfg.vote_feature)
            if which == BaselineName.AVG:
                per_item = baselines.average_grade(grades)
            else:
                estimates, _ = baselines.em_grades(grades, cfg.grade_iterations, cfg.var_floor)
                per_item = baselines.round_grades(estimates)
            index = grades.item_index()
            return self._lookup(per_item, index, test, lambda g: int(g))

        votes = VoteMatrix.from_graph(prepared.graph, cfg.vote_feature)
        if which == BaselineName.MAJORITY:
            per_item = baselines.majority_vote(votes)
        elif which == BaselineName.KOS:
            per_item = baselines.kos(votes, cfg.kos_iterations, self.streams.rng("baseline"))
        else:
            per_item, _ = baselines.em_boolean(votes, cfg.em_alpha, cfg.em_beta, cfg.em_iterations)
        return self._lookup(per_item, votes.item_index(), test, vote_to_class)

    @staticmethod
    def _lookup(per_item: np.ndarray, index: dict[str, int], test: LabeledDataset, to_class) -> np.ndarray:
        missing = [r for r in test.roots if r not in index]
        if missing:
            raise ValueError(f"Test node {missing[0]!r} has no votes or grades in the edge data")
        return np.array([to_class(per_item[index[r]]) for r in test.roots], dtype=np.int64)

    def run_baseline(self, which: BaselineName | str | None = None) -> RunResult:
        start = time.perf_counter()
        which = BaselineName(which or self.config.baseline.name)
        prepared = self.prepare()
        test = prepared.test
        if not test.is_classification:
            raise ValueError(f"Baseline {which} needs classification labels")
        preds = self.baseline_predictions(which, prepared)
        n_classes = test.class_count
        if which in (BaselineName.AVG, BaselineName.EM_GRADES):
            n_classes = max(n_classes, GRADE_CLASSES)
        summary = summarize(test.labels, preds, n_classes)
        artifacts = {
            "metrics": str(
                export.write_metrics(summary, which.value, self.output_dir / f"metrics_{which.value}.csv")
            )
        }
        logger.bind(metrics=True).info(
            "baseline", method=which.value, accuracy=summary["accuracy"],
            average_recall=summary["average_recall"],
        )
        return self._finish(f"baseline_{which.value}", start, summary, artifacts)

    # ── Reports ──────────────────────────────────────────

    def _finish(
        self, command: str, start: float, metrics: dict[str, Any], artifacts: dict[str, str]
    ) -> RunResult:
        wall = time.perf_counter() - start
        report = export.write_report(
            self.output_dir / f"report_{command}.json", command, self.config, wall, metrics, artifacts
        )
        artifacts = {**artifacts, "report": str(report)}
        logger.info(f"{command} finished in {wall:.2f}s")
        return RunResult(command, metrics, artifacts, wall_time_s=wall)
