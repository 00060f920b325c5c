"""LSTM sequence learner: forward, backpropagation through time, init.

A learner of shape (N, K) maps a variable-length sequence of N-vectors to
one K-vector, the final hidden state. Standard cell without peepholes:

    i = σ(W_i x + U_i h + b_i)      f = σ(W_f x + U_f h + b_f)
    o = σ(W_o x + U_o h + b_o)      g = tanh(W_g x + U_g h + b_g)
    c_t = f ⊙ c_{t-1} + i ⊙ g       h_t = o ⊙ tanh(c_t)

with h_0 = c_0 = 0. Gate weights are stored stacked in the order
input, forget, output, candidate: ``W`` is (4K, N), ``U`` is (4K, K),
``b`` is (4K,). All arithmetic is float64.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError

GATES = ("input", "forget", "output", "candidate")
INIT_RANGE = 0.08
FORGET_BIAS = 1.0


@dataclass(frozen=True)
class LearnerShape:
    input_width: int
    output_width: int

    def __post_init__(self) -> None:
        if self.input_width < 1 or self.output_width < 1:
            raise ShapeError(f"Learner shape must be positive, got {self}")


@dataclass(eq=False)
class _GateArrays:
    W: np.ndarray
    U: np.ndarray
    b: np.ndarray
    shape: LearnerShape

    @classmethod
    def zeros(cls, shape: LearnerShape):
        n, k = shape.input_width, shape.output_width
        return cls(np.zeros((4 * k, n)), np.zeros((4 * k, k)), np.zeros(4 * k), shape)

    def arrays(self) -> Iterator[tuple[str, np.ndarray]]:
        yield "W", self.W
        yield "U", self.U
        yield "b", self.b

    def gate(self, name: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(W_γ, U_γ, b_γ)`` views for one gate."""
        k = self.shape.output_width
        j = GATES.index(name)
        rows = slice(j * k, (j + 1) * k)
        return self.W[rows], self.U[rows], self.b[rows]

    def copy(self):
        return type(self)(self.W.copy(), self.U.copy(), self.b.copy(), self.shape)

    def flat(self) -> np.ndarray:
        return np.concatenate([self.W.ravel(), self.U.ravel(), self.b.ravel()])

    @property
    def size(self) -> int:
        return self.W.size + self.U.size + self.b.size

    def check_shape(self, other: _GateArrays) -> None:
        if self.shape != other.shape:
            raise ShapeError(f"Shape mismatch: {self.shape} vs {other.shape}")


@dataclass(eq=False)
class LstmParams(_GateArrays):
    """Weights of one learner."""


@dataclass(eq=False)
class LstmGrads(_GateArrays):
    """∂L/∂w with the LstmParams layout."""

    def add_(self, other: LstmGrads) -> LstmGrads:
        self.check_shape(other)
        self.W += other.W
        self.U += other.U
        self.b += other.b
        return self

    def scale_(self, factor: float) -> LstmGrads:
        self.W *= factor
        self.U *= factor
        self.b *= factor
        return self


@dataclass(eq=False)
class LstmCache:
    """Per-timestep activations kept for backpropagation.

    ``c`` and ``h`` have n+1 rows; row 0 is the zero initial state.
    """

    xs: np.ndarray  # (n, N)
    gates: np.ndarray  # (n, 4K) activated i, f, o, g
    c: np.ndarray  # (n+1, K)
    h: np.ndarray  # (n+1, K)
    tanh_c: np.ndarray  # (n, K)
    shape: LearnerShape

    @property
    def length(self) -> int:
        return int(self.xs.shape[0])


def init_params(shape: LearnerShape, seed: int | np.random.Generator) -> LstmParams:
    """Uniform(-0.08, 0.08) weights, forget bias 1.0, other biases 0."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n, k = shape.input_width, shape.output_width
    W = rng.uniform(-INIT_RANGE, INIT_RANGE, size=(4 * k, n))
    U = rng.uniform(-INIT_RANGE, INIT_RANGE, size=(4 * k, k))
    b = np.zeros(4 * k)
    b[k : 2 * k] = FORGET_BIAS
    return LstmParams(W, U, b, shape)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def as_sequence(xs: Sequence[Sequence[float]] | np.ndarray, width: int) -> np.ndarray:
    seq = np.asarray(xs, dtype=np.float64)
    if seq.size == 0:
        return np.zeros((0, width))
    if seq.ndim != 2 or seq.shape[1] != width:
        raise ShapeError(f"Expected a sequence of {width}-vectors, got shape {seq.shape}")
    return seq


def lstm_forward(
    params: LstmParams, xs: Sequence[Sequence[float]] | np.ndarray
) -> tuple[np.ndarray, LstmCache]:
    """Run the recurrence over ``xs``; return the final hidden state and the cache."""
    n_in, k = params.shape.input_width, params.shape.output_width
    seq = as_sequence(xs, n_in)
    n = seq.shape[0]

    gates = np.empty((n, 4 * k))
    c = np.zeros((n + 1, k))
    h = np.zeros((n + 1, k))
    tanh_c = np.empty((n, k))

    for t in range(n):
        z = params.W @ seq[t] + params.U @ h[t] + params.b
        gates[t, : 3 * k] = _sigmoid(z[: 3 * k])
        gates[t, 3 * k :] = np.tanh(z[3 * k :])
        i, f, g = gates[t, :k], gates[t, k : 2 * k], gates[t, 3 * k :]
        o = gates[t, 2 * k : 3 * k]
        c[t + 1] = f * c[t] + i * g
        tanh_c[t] = np.tanh(c[t + 1])
        h[t + 1] = o * tanh_c[t]

    cache = LstmCache(seq, gates, c, h, tanh_c, params.shape)
    return h[n].copy(), cache


def lstm_backward(
    params: LstmParams, cache: LstmCache, dy: Sequence[float] | np.ndarray
) -> tuple[np.ndarray, LstmGrads]:
    """Backpropagation through time from ∂L/∂y at the final hidden state.

    Returns ∂L/∂x for every timestep, shape (n, N), and ∂L/∂w summed
    over timesteps.
    """
    if cache.shape != params.shape:
        raise ShapeError(f"Cache shape {cache.shape} does not match params {params.shape}")
    k = params.shape.output_width
    dy = np.asarray(dy, dtype=np.float64)
    if dy.shape != (k,):
        raise ShapeError(f"Output adjoint must have length {k}, got shape {dy.shape}")

    n = cache.length
    grads = LstmGrads.zeros(params.shape)
    dxs = np.zeros((n, params.shape.input_width))

    dh = dy.copy()
    dc = np.zeros(k)
    dz = np.empty(4 * k)
    for t in reversed(range(n)):
        i = cache.gates[t, :k]
        f = cache.gates[t, k : 2 * k]
        o = cache.gates[t, 2 * k : 3 * k]
        g = cache.gates[t, 3 * k :]
        tc = cache.tanh_c[t]

        dc = dc + dh * o * (1.0 - tc * tc)
        dz[:k] = dc * g * i * (1.0 - i)
        dz[k : 2 * k] = dc * cache.c[t] * f * (1.0 - f)
        dz[2 * k : 3 * k] = dh * tc * o * (1.0 - o)
        dz[3 * k :] = dc * i * (1.0 - g * g)

        grads.W += np.outer(dz, cache.xs[t])
        grads.U += np.outer(dz, cache.h[t])
        grads.b += dz
        dxs[t] = params.W.T @ dz
        dh = params.U.T @ dz
        dc = dc * f

    return dxs, grads
