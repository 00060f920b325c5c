"""Configuration loader: YAML + env vars -> validated RunConfig."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv
from loguru import logger

from .models import RunConfig


def load_config(
    config_path: str = "config/config.yaml",
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Load and validate configuration from a YAML file.

    Environment variables from .env are loaded first so that
    ``LOG_LEVEL`` and ``MLSL_SEED`` can override the file. A JSON run report
    is accepted too: its embedded ``config`` is used,
    which is how a run is reproduced from its report.
    """
    env_path = Path(".env")
    if env_path.exists():
        load_dotenv(env_path)
        logger.info(f"Loaded environment from {env_path.resolve()}")

    config_file = Path(config_path)
    if not config_file.exists():
        raise FileNotFoundError(f"Config file not found: {config_file.resolve()}")

    with open(config_file, encoding="utf-8") as f:
        raw = json.load(f) if config_file.suffix == ".json" else yaml.safe_load(f)

    if raw is None:
        raise ValueError(f"Config file is empty: {config_file}")
    if not isinstance(raw, dict):
        raise ValueError(f"Config file must hold a mapping: {config_file}")

    if "command" in raw and "config" in raw:
        logger.info(f"Reading embedded config from run report {config_file}")
        raw = raw["config"]

    env_log_level = os.getenv("LOG_LEVEL")
    if env_log_level:
        raw.setdefault("logging", {})["level"] = env_log_level

    env_seed = os.getenv("MLSL_SEED")
    if env_seed:
        raw["seed"] = int(env_seed)

    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value

    config = RunConfig(**raw)

    logger.info(
        f"Config loaded: seed={config.seed}, source={config.data.source.value}, "
        f"depth={config.model.depth}, levels={config.model.level_sizes}, "
        f"unfolding={config.train.unfolding.value}, epochs={config.train.epochs}"
    )
    return config
