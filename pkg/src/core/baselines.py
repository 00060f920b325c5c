"""Label-aggregation baselines for crowdsourcing, grading and guessing.

Boolean baselines work on a ``VoteMatrix`` and return one ±1 label per
item; ties always resolve to +1. Grade baselines work on a
``GradeMatrix`` and return per-item estimates in [0, 10].
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from loguru import logger

from src.data.models import GRADE_MAX, GRADE_MIN, GradeMatrix, VoteMatrix

from .errors import NumericError

RELIABILITY_CLIP = 1e-9


def _rng(seed: int | np.random.Generator) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _sign(stat: np.ndarray) -> np.ndarray:
    return np.where(stat >= 0, 1, -1)


# ── Boolean labels ───────────────────────────────────────


def majority_vote(votes: VoteMatrix) -> np.ndarray:
    sums = np.bincount(votes.item_idx, weights=votes.votes, minlength=votes.n_items)
    return _sign(sums)


def kos(
    votes: VoteMatrix,
    k_max: int = 10,
    seed: int | np.random.Generator = 0,
    init: str = "normal",
) -> np.ndarray:
    """Iterative leave-one-out message passing on the item–worker graph.

    Messages live on votes: x_{i→j} (item to worker) and y_{j→i} (worker
    to item). y starts i.i.d. Normal(1, 1) (``init="ones"`` starts it at
    1.0), x at 0. Each round:

        x_{i→j} ← Σ_{j'≠j} A_{ij'} y_{j'→i}
        y_{j→i} ← Σ_{i'≠i} A_{i'j} x_{i'→j}

    A message with an empty leave-one-out set keeps its previous value.
    The label of item i is sign(Σ_j A_ij y_{j→i}).
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    ii, jj = votes.item_idx, votes.worker_idx
    A = votes.votes.astype(np.float64)

    if init == "normal":
        y = _rng(seed).normal(1.0, 1.0, size=A.shape[0])
    elif init == "ones":
        y = np.ones(A.shape[0])
    else:
        raise ValueError(f"Unknown KOS init: {init!r}")
    x = np.zeros(A.shape[0])

    keep_x = np.bincount(ii, minlength=votes.n_items)[ii] == 1
    keep_y = np.bincount(jj, minlength=votes.n_workers)[jj] == 1
    logger.debug(f"KOS: {int(keep_x.sum())} item and {int(keep_y.sum())} worker messages have empty exclusion sets")

    for k in range(k_max):
        item_sum = np.bincount(ii, weights=A * y, minlength=votes.n_items)
        x = np.where(keep_x, x, item_sum[ii] - A * y)
        worker_sum = np.bincount(jj, weights=A * x, minlength=votes.n_workers)
        y = np.where(keep_y, y, worker_sum[jj] - A * x)
        if not np.all(np.isfinite(y)):
            raise NumericError(f"KOS messages overflowed at iteration {k + 1}")

    decision = np.bincount(ii, weights=A * y, minlength=votes.n_items)
    return _sign(decision)


def _posterior_positive(votes: VoteMatrix, reliability: np.ndarray) -> np.ndarray:
    """P(label_i = +1) under the one-coin model with a uniform class prior."""
    log_odds = np.log(reliability) - np.log1p(-reliability)
    item_log_odds = np.bincount(
        votes.item_idx, weights=votes.votes * log_odds[votes.worker_idx], minlength=votes.n_items
    )
    return 1.0 / (1.0 + np.exp(-np.clip(item_log_odds, -700.0, 700.0)))


def em_boolean(
    votes: VoteMatrix,
    alpha: float = 1.2,
    beta: float = 1.0,
    iters: int = 50,
) -> tuple[np.ndarray, np.ndarray]:
    """EM for ±1 labels with a Beta(alpha, beta) prior on worker reliability.

    Each worker is correct with probability p_j. Reliabilities start at
    0.5; each iteration runs an E-step (item posteriors) then a MAP M-step

        p_j ← (α − 1 + soft agreements_j) / (α + β − 2 + votes_j)

    and labels come from a final E-step. Returns (labels, reliabilities).
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    if alpha <= 0 or beta <= 0:
        raise ValueError(f"Beta prior needs alpha, beta > 0, got ({alpha}, {beta})")

    ii, jj = votes.item_idx, votes.worker_idx
    n_votes = np.bincount(jj, minlength=votes.n_workers).astype(np.float64)
    p = np.full(votes.n_workers, 0.5)

    for _ in range(iters):
        post = _posterior_positive(votes, p)
        agree = np.where(votes.votes > 0, post[ii], 1.0 - post[ii])
        soft = np.bincount(jj, weights=agree, minlength=votes.n_workers)
        denom = alpha + beta - 2.0 + n_votes
        safe = np.where(denom > 0, denom, 1.0)
        p = np.where(denom > 0, (alpha - 1.0 + soft) / safe, 0.5)
        clipped = (p < RELIABILITY_CLIP) | (p > 1.0 - RELIABILITY_CLIP)
        if clipped.any():
            logger.debug(f"EM: clipped {int(clipped.sum())} reliabilities into (0, 1)")
        p = np.clip(p, RELIABILITY_CLIP, 1.0 - RELIABILITY_CLIP)

    post = _posterior_positive(votes, p)
    return _sign(post - 0.5), p


# ── Grades ───────────────────────────────────────────────


def round_grades(estimates: np.ndarray) -> np.ndarray:
    """Half-up rounding clamped to the grade range."""
    return np.clip(np.floor(np.asarray(estimates) + 0.5), GRADE_MIN, GRADE_MAX).astype(np.int64)


def _grade_counts(grades: GradeMatrix) -> np.ndarray:
    counts = np.bincount(grades.item_idx, minlength=grades.n_items)
    missing = np.flatnonzero(counts == 0)
    if missing.size:
        raise ValueError(f"Item without grades: {grades.items[missing[0]]!r}")
    return counts


def average_grade(grades: GradeMatrix) -> np.ndarray:
    counts = _grade_counts(grades)
    means = np.bincount(grades.item_idx, weights=grades.grades, minlength=grades.n_items) / counts
    return round_grades(means)


def em_grades(
    grades: GradeMatrix,
    iters: int = 20,
    var_floor: float = 0.05,
) -> tuple[np.ndarray, np.ndarray]:
    """Variance-weighted grade aggregation.

    Starts from plain means; each iteration sets a worker's variance to the
    mean squared deviation of their grades from the current estimates
    (floored at ``var_floor``) and re-estimates items as inverse-variance
    weighted means. Returns (real-valued estimates, worker variances);
    ``round_grades`` gives the class output.
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    ii, jj, g = grades.item_idx, grades.worker_idx, grades.grades
    counts = _grade_counts(grades)
    n_workers = len(grades.workers)
    worker_counts = np.bincount(jj, minlength=n_workers).astype(np.float64)

    estimates = np.bincount(ii, weights=g, minlength=grades.n_items) / counts
    variances = np.full(n_workers, var_floor)
    for _ in range(iters):
        dev2 = (g - estimates[ii]) ** 2
        sq = np.bincount(jj, weights=dev2, minlength=n_workers)
        variances = np.maximum(sq / np.maximum(worker_counts, 1.0), var_floor)
        w = 1.0 / variances[jj]
        estimates = np.bincount(ii, weights=w * g, minlength=grades.n_items) / np.bincount(
            ii, weights=w, minlength=grades.n_items
        )
    return estimates, variances


# ── Guessing ─────────────────────────────────────────────


def proportional_guess(
    train_labels: Sequence[int],
    test_size: int,
    seed: int | np.random.Generator = 0,
) -> np.ndarray:
    """I.i.d. draws from the empirical class distribution of the training labels."""
    labels = np.asarray(train_labels, dtype=np.int64)
    if labels.size == 0:
        raise ValueError("proportional_guess needs at least one training label")
    classes, counts = np.unique(labels, return_counts=True)
    return _rng(seed).choice(classes, size=test_size, p=counts / counts.sum())
