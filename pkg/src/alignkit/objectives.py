"""Numeric kernels for the training objectives.

Pure functions over probability tables: token-level cross entropy, (smoothed)
KL divergence, its symmetrized form, and the weighted total that combines a
speech-target loss, a text-target loss, and two symmetric KL consistency
terms. No autodiff, no model: these exist so downstream integrators and the
test suite can pin the arithmetic.

Zeros inside logarithms are handled by additive smoothing rather than
masking, which keeps every kernel total; the smoothing constant is exposed.
Reductions over positions default to the mean and can be switched to a sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, ShapeMismatch

__all__ = [
    "DistributionTable",
    "ObjectiveConfig",
    "cross_entropy",
    "kl_divergence",
    "symmetric_kl",
    "total_loss",
]

_REDUCTIONS = ("mean", "sum")


@dataclass
class DistributionTable:
    """An L x V table of per-position probability distributions."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.probs, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ShapeMismatch(f"expected a non-empty 2-D table, got shape {arr.shape}")
        if np.any(arr < 0):
            raise ValueError("probabilities must be nonnegative")
        if np.any(np.abs(arr.sum(axis=1) - 1.0) > 1e-5):
            raise ValueError("each row must sum to 1 within 1e-5")
        self.probs = arr

    @property
    def positions(self) -> int:
        return self.probs.shape[0]

    @property
    def vocab(self) -> int:
        return self.probs.shape[1]


@dataclass
class ObjectiveConfig:
    """KL weight and the log-smoothing constant for the combined loss."""

    kl_weight: float
    epsilon_smooth: float = 1e-9

    def __post_init__(self):
        if self.kl_weight < 0:
            raise ValueError("kl_weight must be nonnegative")
        if not 0.0 < self.epsilon_smooth <= 1e-6:
            raise ValueError("epsilon_smooth must lie in (0, 1e-6]")


def _reduce(per_position: np.ndarray, reduction: str) -> float:
    if reduction not in _REDUCTIONS:
        raise ValueError(f"reduction must be one of {_REDUCTIONS}, got {reduction!r}")
    return float(per_position.mean() if reduction == "mean" else per_position.sum())


def cross_entropy(
    pred: DistributionTable,
    targets,
    epsilon_smooth: float = 1e-9,
    reduction: str = "mean",
) -> float:
    """Negative log probability of the target token at each position."""
    idx = np.asarray(targets, dtype=np.int64)
    if idx.ndim != 1 or idx.shape[0] != pred.positions:
        raise ShapeMismatch(
            f"expected {pred.positions} targets, got shape {idx.shape}"
        )
    if idx.size and (idx.min() < 0 or idx.max() >= pred.vocab):
        raise IndexOutOfRange(f"targets must lie in [0, {pred.vocab - 1}]")
    picked = pred.probs[np.arange(pred.positions), idx]
    return _reduce(-np.log(picked + epsilon_smooth), reduction)


def kl_divergence(
    p: DistributionTable,
    q: DistributionTable,
    epsilon_smooth: float = 1e-9,
    reduction: str = "mean",
) -> float:
    """Smoothed KL divergence of p from q, reduced over positions.

    With smoothing the result can undershoot zero by at most ~1e-9.
    """
    if p.probs.shape != q.probs.shape:
        raise ShapeMismatch(
            f"table shapes differ: {p.probs.shape} vs {q.probs.shape}"
        )
    ratio = np.log(p.probs + epsilon_smooth) - np.log(q.probs + epsilon_smooth)
    return _reduce((p.probs * ratio).sum(axis=1), reduction)


def symmetric_kl(
    p: DistributionTable,
    q: DistributionTable,
    epsilon_smooth: float = 1e-9,
    reduction: str = "mean",
) -> float:
    """Sum of the two KL directions; symmetric in its arguments."""
    return kl_divergence(p, q, epsilon_smooth, reduction) + kl_divergence(
        q, p, epsilon_smooth, reduction
    )


def total_loss(
    l_st: float,
    l_mt: float,
    kl_sm: float,
    kl_xm: float,
    config: ObjectiveConfig,
) -> float:
    """Combined objective: both task losses plus the averaged, weighted KL terms."""
    return l_st + l_mt + config.kl_weight * (kl_sm + kl_xm) / 2.0
