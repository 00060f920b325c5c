"""Edit-quality feature for revision graphs.

Given edit distances among three consecutive revisions r0 → r1 → r2,
the quality of r1 as judged by r2 is

    q = d(r0, r1) / (d(r0, r2) − d(r1, r2))

clamped to [−1, 1]. A full revert (r2 == r0) scores −1, a change that
survives untouched scores +1.
"""

from __future__ import annotations

import math

from loguru import logger

ZERO_DENOMINATOR = 1e-9


def compute_quality(d01: float, d02: float, d12: float) -> float:
    if not all(math.isfinite(d) for d in (d01, d02, d12)):
        raise ValueError(f"Edit distances must be finite, got ({d01}, {d02}, {d12})")
    if d01 < 0 or d02 < 0 or d12 < 0:
        raise ValueError(f"Edit distances must be non-negative, got ({d01}, {d02}, {d12})")
    if d01 == 0:
        return 0.0
    denom = d02 - d12
    if abs(denom) < ZERO_DENOMINATOR:
        logger.debug(f"Quality undefined for d02={d02} d12={d12}; using 0")
        return 0.0
    q = d01 / denom
    if q > 1.0 or q < -1.0:
        logger.debug(f"Quality {q:.4f} clamped to [-1, 1]")
        return max(-1.0, min(1.0, q))
    return q
