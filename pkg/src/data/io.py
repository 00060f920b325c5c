"""File formats: edge lists, label files, truth sidecars and model files.

All text is UTF-8, comma separated, ``\\n`` line endings. Reals are written
with 17 significant digits so a save/load round trip is exact.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from loguru import logger
from pydantic import BaseModel, ValidationError

from src.config.models import OutputMode
from src.core.errors import ParseError, ShapeError
from src.core.graph import Graph
from src.core.lstm import LearnerShape, LstmParams
from src.core.mlsl import MlslModel

from .models import LabeledDataset, SynthTruth

MODEL_FORMAT_VERSION = 1


def _real(value: float) -> str:
    return format(float(value), ".17g")


def _ensure_parent(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)


def _read_rows(path: str | Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Header plus (1-based line number, fields) for every non-blank row."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    try:
        with open(path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            rows = [(reader.line_num, row) for row in reader if row]
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 ({exc.reason} at byte {exc.start})", str(path)) from exc
    if not rows:
        raise ParseError("file is empty", str(path))
    (_, header), body = rows[0], rows[1:]
    return [h.strip() for h in header], body


# ── Edge lists ───────────────────────────────────────────


def load_graph(path: str | Path) -> Graph:
    """Read ``src,dst,f1,...,fM``; row order becomes the as-loaded edge order."""
    header, body = _read_rows(path)
    if len(header) < 2 or header[:2] != ["src", "dst"]:
        raise ParseError("header must start with 'src,dst'", str(path), 1)
    width = len(header) - 2

    sources, targets, features = [], [], []
    for line, row in body:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} columns, got {len(row)}", str(path), line)
        try:
            feats = [float(v) for v in row[2:]]
        except ValueError as exc:
            raise ParseError(f"non-numeric feature ({exc})", str(path), line) from exc
        if not all(np.isfinite(feats)):
            raise ParseError("features must be finite", str(path), line)
        sources.append(row[0])
        targets.append(row[1])
        features.append(feats)

    graph = Graph(sources, targets, np.array(features).reshape(len(features), width))
    logger.info(f"Loaded graph {path}: {len(graph.nodes)} nodes, {graph.num_edges} edges, M={width}")
    return graph


def save_graph(graph: Graph, path: str | Path) -> Path:
    path = Path(path)
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["src", "dst", *(f"f{i + 1}" for i in range(graph.feature_width))])
        for s, t, row in zip(graph.sources, graph.targets, graph.features):
            writer.writerow([s, t, *(_real(v) for v in row)])
    logger.debug(f"Wrote {graph.num_edges} edges -> {path}")
    return path


# ── Labels ───────────────────────────────────────────────


def load_labels(
    path: str | Path,
    graph: Graph,
    output_mode: OutputMode = OutputMode.CLASSIFICATION,
    class_count: int | None = None,
) -> LabeledDataset:
    """Read ``node,label`` (regression files may carry several label columns).

    The class count defaults to max(label) + 1, at least 2.
    """
    header, body = _read_rows(path)
    if len(header) < 2 or header[0] != "node":
        raise ParseError("header must start with 'node'", str(path), 1)
    if output_mode == OutputMode.CLASSIFICATION and len(header) != 2:
        raise ParseError("classification label files have exactly 'node,label'", str(path), 1)

    roots: list[str] = []
    labels: list[list[float]] = []
    for line, row in body:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} columns, got {len(row)}", str(path), line)
        if not graph.has_node(row[0]):
            raise ParseError(f"unknown node {row[0]!r}", str(path), line)
        try:
            values = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise ParseError(f"non-numeric label ({exc})", str(path), line) from exc
        if output_mode == OutputMode.CLASSIFICATION:
            if values[0] < 0 or values[0] != int(values[0]):
                raise ParseError(f"class label must be a non-negative integer, got {row[1]!r}", str(path), line)
        roots.append(row[0])
        labels.append(values)

    if output_mode == OutputMode.REGRESSION:
        return LabeledDataset(graph, roots, np.array(labels), regression_width=len(header) - 1)
    classes = np.array([int(v[0]) for v in labels], dtype=np.int64)
    if class_count is None:
        class_count = max(int(classes.max()) + 1 if classes.size else 0, 2)
    return LabeledDataset(graph, roots, classes, class_count=class_count)


def save_labels(dataset: LabeledDataset, path: str | Path) -> Path:
    path = Path(path)
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        if dataset.is_classification:
            writer.writerow(["node", "label"])
            for root, label in zip(dataset.roots, dataset.labels):
                writer.writerow([root, int(label)])
        else:
            width = dataset.labels.shape[1]
            names = ["label"] if width == 1 else [f"label{i + 1}" for i in range(width)]
            writer.writerow(["node", *names])
            for root, row in zip(dataset.roots, dataset.labels):
                writer.writerow([root, *(_real(v) for v in row)])
    return path


def save_truth(
    items: list[str],
    users: list[str],
    truth: SynthTruth,
    path: str | Path,
) -> Path:
    """Hidden synthetic state: ``node,role,true_label,reliable,indicator``."""
    path = Path(path)
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["node", "role", "true_label", "reliable", "indicator"])
        for item, label in zip(items, truth.item_labels):
            writer.writerow([item, "item", int(label), "", ""])
        for j, user in enumerate(users):
            indicator = "" if truth.indicator is None else int(truth.indicator[j])
            writer.writerow([user, "user", "", int(truth.reliable[j]), indicator])
    return path


# ── Model files ──────────────────────────────────────────


class LearnerDocument(BaseModel):
    input_width: int
    output_width: int
    W: list[list[float]]
    U: list[list[float]]
    b: list[float]

    def to_params(self) -> LstmParams:
        shape = LearnerShape(self.input_width, self.output_width)
        params = LstmParams(
            np.array(self.W, dtype=np.float64).reshape(4 * self.output_width, self.input_width),
            np.array(self.U, dtype=np.float64).reshape(4 * self.output_width, self.output_width),
            np.array(self.b, dtype=np.float64).reshape(4 * self.output_width),
            shape,
        )
        return params


class ModelDocument(BaseModel):
    format_version: int
    depth: int
    feature_width: int
    level_sizes: list[int]
    output_mode: OutputMode
    learners: list[LearnerDocument]


def save_model(model: MlslModel, path: str | Path) -> Path:
    """JSON model file; weight matrices are nested row-major lists."""
    doc = ModelDocument(
        format_version=MODEL_FORMAT_VERSION,
        depth=model.depth,
        feature_width=model.feature_width,
        level_sizes=list(model.level_sizes),
        output_mode=model.output_mode,
        learners=[
            LearnerDocument(
                input_width=p.shape.input_width,
                output_width=p.shape.output_width,
                W=p.W.tolist(),
                U=p.U.tolist(),
                b=p.b.tolist(),
            )
            for p in model.learners
        ],
    )
    path = Path(path)
    _ensure_parent(path)
    path.write_text(doc.model_dump_json(indent=1) + "\n", encoding="utf-8")
    logger.info(f"Saved depth-{model.depth} model -> {path}")
    return path


def load_model(path: str | Path, expected_feature_width: int | None = None) -> MlslModel:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Model file not found: {path}")
    try:
        doc = ModelDocument.model_validate_json(path.read_text(encoding="utf-8"))
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 ({exc.reason} at byte {exc.start})", str(path)) from exc
    except ValidationError as exc:
        raise ParseError(f"invalid model file: {exc.errors()[0]['msg']}", str(path)) from exc

    if doc.format_version != MODEL_FORMAT_VERSION:
        raise ParseError(
            f"unsupported model format version {doc.format_version} (expected {MODEL_FORMAT_VERSION})",
            str(path),
        )
    if doc.depth != len(doc.level_sizes) or doc.depth != len(doc.learners):
        raise ShapeError(f"{path}: depth {doc.depth} disagrees with level sizes or learners")
    if expected_feature_width is not None and doc.feature_width != expected_feature_width:
        raise ShapeError(
            f"{path}: model expects M={doc.feature_width}, data has M={expected_feature_width}"
        )
    try:
        learners = [learner.to_params() for learner in doc.learners]
    except ValueError as exc:
        raise ShapeError(f"{path}: weight array has the wrong size ({exc})") from exc
    return MlslModel(learners, doc.feature_width, list(doc.level_sizes), doc.output_mode)
