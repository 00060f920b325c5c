"""CSV and JSON report writers."""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import asdict
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from loguru import logger
from rich.table import Table

from src.config.models import RunConfig

HISTORY_COLUMNS = ["epoch", "mean_loss", "eval_accuracy", "eval_avg_recall"]


def _write_frame(df: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, lineterminator="\n")
    return path


def write_history(history: Sequence[Any], path: str | Path) -> Path:
    """One row per epoch; epochs without evaluation leave the eval cells empty."""
    df = pd.DataFrame([asdict(r) for r in history], columns=HISTORY_COLUMNS)
    path = _write_frame(df, path)
    logger.info(f"Exported {len(df)} epochs -> {path}")
    return path


def metrics_rows(summary: dict[str, Any], method: str) -> list[dict[str, Any]]:
    """Flatten a metrics summary into ``method,metric,value`` rows.

    Scalars keep their key; ``f1`` becomes ``f1_class<c>`` and
    ``confusion`` becomes ``confusion_<true>_<pred>``.
    """
    rows = []
    for key, value in summary.items():
        if key == "f1":
            rows += [
                {"method": method, "metric": f"f1_class{c}", "value": f1}
                for c, f1 in enumerate(value)
            ]
        elif key == "confusion":
            rows += [
                {"method": method, "metric": f"confusion_{t}_{p}", "value": count}
                for t, row in enumerate(value)
                for p, count in enumerate(row)
            ]
        else:
            rows.append({"method": method, "metric": key, "value": value})
    return rows


def write_metrics(summary: dict[str, Any], method: str, path: str | Path) -> Path:
    df = pd.DataFrame(metrics_rows(summary, method), columns=["method", "metric", "value"])
    path = _write_frame(df, path)
    logger.info(f"Exported {method} metrics -> {path}")
    return path


def write_predictions(
    roots: Sequence[str],
    truth: Sequence[int],
    predicted: Sequence[int],
    path: str | Path,
    probabilities: np.ndarray | None = None,
) -> Path:
    df = pd.DataFrame({"node": list(roots), "true_label": truth, "predicted": predicted})
    if probabilities is not None:
        for c in range(probabilities.shape[1]):
            df[f"p{c}"] = probabilities[:, c]
    return _write_frame(df, path)


def write_report(
    path: str | Path,
    command: str,
    config: RunConfig,
    wall_time_s: float,
    metrics: dict[str, Any] | None = None,
    artifacts: dict[str, str] | None = None,
) -> Path:
    """Self-contained run report; ``load_config`` accepts it as a config file."""
    report = {
        "command": command,
        "seed": config.seed,
        "created_at": datetime.now(UTC).isoformat(timespec="seconds"),
        "wall_time_s": round(wall_time_s, 3),
        "config": config.model_dump(mode="json"),
        "metrics": metrics or {},
        "artifacts": artifacts or {},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Run report -> {path}")
    return path


def metrics_table(results: dict[str, dict[str, Any]], title: str = "Metrics") -> Table:
    table = Table(title=title, show_header=True, header_style="bold cyan", border_style="blue")
    table.add_column("Method")
    table.add_column("Accuracy", justify="right")
    table.add_column("Avg recall", justify="right")
    table.add_column("F1", justify="right")
    table.add_column("N", justify="right")
    for method, summary in results.items():
        if "accuracy" not in summary:
            table.add_row(method, "-", "-", f"mse={summary['mse']:.4f}", str(summary["n_samples"]))
            continue
        table.add_row(
            method,
            f"{summary['accuracy']:.4f}",
            f"{summary['average_recall']:.4f}",
            " ".join(f"{f:.3f}" for f in summary["f1"]),
            str(summary["n_samples"]),
        )
    return table
