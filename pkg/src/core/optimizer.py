"""AdaDelta parameter updates, one optimizer state per learner.

Per parameter, with decay ρ, conditioning ε and level scale α:

    E[g²]  ← ρ E[g²] + (1 − ρ) g²
    Δ      = −α · sqrt(E[Δx²] + ε) / sqrt(E[g²] + ε) · g
    E[Δx²] ← ρ E[Δx²] + (1 − ρ) Δ²
    w      ← w + Δ
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .lstm import LearnerShape, LstmGrads, LstmParams


@dataclass(eq=False)
class AdaDeltaState:
    accum_grad_sq: LstmGrads
    accum_delta_sq: LstmGrads
    rho: float = 0.95
    epsilon: float = 1e-6
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must be in (0, 1), got {self.rho}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.scale <= 0.0:
            raise ValueError(f"scale must be > 0, got {self.scale}")

    @classmethod
    def fresh(
        cls,
        shape: LearnerShape,
        rho: float = 0.95,
        epsilon: float = 1e-6,
        scale: float = 1.0,
    ) -> AdaDeltaState:
        return cls(LstmGrads.zeros(shape), LstmGrads.zeros(shape), rho, epsilon, scale)


def adadelta_update(
    state: AdaDeltaState, params: LstmParams, grads: LstmGrads
) -> tuple[LstmParams, AdaDeltaState]:
    """Apply one AdaDelta step in place; returns ``(params, state)``."""
    params.check_shape(grads)
    params.check_shape(state.accum_grad_sq)
    for name, g in grads.arrays():
        if not np.all(np.isfinite(g)):
            raise NumericError(f"Non-finite gradient entries in {name}")

    rho, eps = state.rho, state.epsilon
    for (_, p), (_, g), (_, eg), (_, ed) in zip(
        params.arrays(),
        grads.arrays(),
        state.accum_grad_sq.arrays(),
        state.accum_delta_sq.arrays(),
    ):
        eg *= rho
        eg += (1.0 - rho) * g * g
        delta = -state.scale * np.sqrt(ed + eps) / np.sqrt(eg + eps) * g
        ed *= rho
        ed += (1.0 - rho) * delta * delta
        p += delta
    return params, state
