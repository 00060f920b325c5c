"""Master seed -> independent named random streams.

Every consumer of randomness asks for its own stream by name (``init``,
``shuffle``, ``visit``, ``split``, ``synth``, ``baseline``). Streams are
derived from ``SeedSequence([master, crc32(name)])`` so adding a new
consumer never shifts the draws of an existing one.
"""

from __future__ import annotations

import zlib

import numpy as np


def stream_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


class SeedStreams:
    """Factory for named, reproducible numpy generators."""

    def __init__(self, master_seed: int) -> None:
        if master_seed < 0:
            raise ValueError(f"Master seed must be non-negative, got {master_seed}")
        self.master_seed = master_seed

    def sequence(self, name: str) -> np.random.SeedSequence:
        return np.random.SeedSequence([self.master_seed, stream_key(name)])

    def rng(self, name: str) -> np.random.Generator:
        """A fresh generator for ``name``; same name, same draws."""
        return np.random.default_rng(self.sequence(name))
