"""Evaluation measures: accuracy, average recall, per-class F1, confusion matrix.

Thin wrappers over ``sklearn.metrics`` that pin the conventions used for
small test splits: classes absent from the truth are left out of the
average recall, and F1 is 0 for a class whose precision and recall are
both 0 (or undefined).
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from sklearn import metrics as skm


def _pair(truth: Sequence[int], pred: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(truth, dtype=np.int64)
    p = np.asarray(pred, dtype=np.int64)
    if t.shape != p.shape:
        raise ValueError(f"Length mismatch: {t.shape[0]} truths vs {p.shape[0]} predictions")
    if t.size == 0:
        raise ValueError("Metrics need at least one sample")
    return t, p


def _checked(truth: Sequence[int], pred: Sequence[int], n_classes: int) -> tuple[np.ndarray, np.ndarray]:
    t, p = _pair(truth, pred)
    if t.min() < 0 or p.min() < 0 or t.max() >= n_classes or p.max() >= n_classes:
        raise ValueError(f"Class indices must lie in [0, {n_classes})")
    return t, p


def confusion_matrix(truth: Sequence[int], pred: Sequence[int], n_classes: int) -> np.ndarray:
    """C×C counts; rows are true classes, columns predicted."""
    t, p = _checked(truth, pred, n_classes)
    return skm.confusion_matrix(t, p, labels=np.arange(n_classes)).astype(np.int64)


def accuracy(truth: Sequence[int], pred: Sequence[int]) -> float:
    t, p = _pair(truth, pred)
    return float(skm.accuracy_score(t, p))


def per_class_recall(truth: Sequence[int], pred: Sequence[int], n_classes: int) -> np.ndarray:
    """Recall per class; NaN for classes absent from the truth."""
    t, p = _checked(truth, pred, n_classes)
    recalls = skm.recall_score(t, p, labels=np.arange(n_classes), average=None, zero_division=0)
    present = np.bincount(t, minlength=n_classes) > 0
    return np.where(present, recalls, np.nan)


def average_recall(truth: Sequence[int], pred: Sequence[int], n_classes: int) -> float:
    """Unweighted mean recall over the classes present in the truth."""
    t, p = _checked(truth, pred, n_classes)
    return float(skm.recall_score(t, p, labels=np.unique(t), average="macro", zero_division=0))


def f1_per_class(truth: Sequence[int], pred: Sequence[int], n_classes: int) -> list[float]:
    t, p = _checked(truth, pred, n_classes)
    scores = skm.f1_score(t, p, labels=np.arange(n_classes), average=None, zero_division=0)
    return [float(s) for s in scores]


def summarize(truth: Sequence[int], pred: Sequence[int], n_classes: int) -> dict:
    """All metrics in one dict (used by reports and CSV export)."""
    return {
        "accuracy": accuracy(truth, pred),
        "average_recall": average_recall(truth, pred, n_classes),
        "f1": f1_per_class(truth, pred, n_classes),
        "confusion": confusion_matrix(truth, pred, n_classes).tolist(),
        "n_samples": int(len(truth)),
        "n_classes": int(n_classes),
    }


def regression_summary(targets: np.ndarray, outputs: np.ndarray) -> dict:
    """Mean squared error (summed over output entries) and mean absolute error."""
    t = np.asarray(targets, dtype=np.float64)
    y = np.asarray(outputs, dtype=np.float64).reshape(t.shape)
    if t.shape[0] == 0:
        raise ValueError("Metrics need at least one sample")
    diff = y - t
    return {
        "mse": float(np.mean(np.sum(diff.reshape(t.shape[0], -1) ** 2, axis=1))),
        "mae": float(np.mean(np.abs(diff))),
        "n_samples": int(t.shape[0]),
    }
