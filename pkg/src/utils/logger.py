"""Structured logging setup using loguru.

Records bound with ``metrics=True`` are per-epoch and per-run numbers; they
go only to the serialized metrics file, never to the console or main log.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

from loguru import logger

from src.config.models import FileLogConfig, LoggingConfig

FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}"
CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{line}</cyan> - "
    "<level>{message}</level>"
)


def _is_metrics(record: dict[str, Any]) -> bool:
    return bool(record["extra"].get("metrics", False))


def _not_metrics(record: dict[str, Any]) -> bool:
    return not _is_metrics(record)


def _add_file_sink(sink: FileLogConfig, log_dir: Path, **options: Any) -> None:
    if not sink.enabled:
        return
    logger.add(
        str(log_dir / Path(sink.path).name),
        level=sink.level,
        rotation=sink.rotation,
        retention=sink.retention,
        **options,
    )


def setup_logger(config: LoggingConfig, log_dir: str | Path = "logs") -> None:
    """Replace loguru's handlers with the configured console and file sinks.

    File sinks keep only the file name from their configured path and are
    placed under ``log_dir`` (the run's ``logs/`` directory).
    """
    logger.remove()

    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    # stderr keeps stdout clean for command output (unfold dumps, tables)
    if config.console.enabled:
        logger.add(
            sys.stderr,
            format=CONSOLE_FORMAT,
            level=config.level,
            colorize=config.console.colorize,
            filter=_not_metrics,
        )

    files = config.files
    _add_file_sink(files.main, log_dir, format=FILE_FORMAT, filter=_not_metrics)
    _add_file_sink(files.metrics, log_dir, format="{message}", serialize=True, filter=_is_metrics)
    _add_file_sink(files.errors, log_dir, format=FILE_FORMAT + "\n{exception}")

    logger.info(f"Logger initialised: level={config.level} dir={log_dir}")
