"""Mixed frame/token sequences built from an alignment.

Two constructions are provided. Discrete mixup replaces each frame embedding
by its aligned token embedding with probability ``p_star``, drawing one
uniform sample per frame from a seeded generator. Interpolation mixup blends
the two deterministically, ``(1 - p_star) * frame + p_star * token``.

Both accept any per-frame assignment (a structurally valid path or a raw
index vector); only the length and index bounds are checked, since mixing is
well defined even for unconstrained alignments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, PathMismatch
from .sequences import EmbeddingSequence, MixupSequence

__all__ = ["MixupConfig", "discrete_mixup", "interpolation_mixup"]

_MODES = ("discrete", "interpolation")


@dataclass
class MixupConfig:
    """Mixing probability/coefficient, mode, and the seed for discrete draws."""

    p_star: float
    mode: str = "discrete"
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_star <= 1.0:
            raise ValueError(f"p_star must lie in [0, 1], got {self.p_star}")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")


def _assignment_for(frames: EmbeddingSequence, tokens: EmbeddingSequence, path) -> np.ndarray:
    if frames.dim != tokens.dim:
        raise DimensionMismatch(
            f"frame dim {frames.dim} does not match token dim {tokens.dim}"
        )
    assignment = np.asarray(getattr(path, "assignment", path), dtype=np.int64)
    if assignment.ndim != 1 or assignment.shape[0] != frames.length:
        raise PathMismatch(
            f"alignment length {assignment.shape[0] if assignment.ndim == 1 else assignment.shape}"
            f" does not match {frames.length} frames"
        )
    if assignment.size and (assignment.min() < 0 or assignment.max() >= tokens.length):
        raise PathMismatch(
            f"alignment indices must lie in [0, {tokens.length - 1}]"
        )
    return assignment


def discrete_mixup(
    frames: EmbeddingSequence,
    tokens: EmbeddingSequence,
    path,
    config: MixupConfig,
) -> MixupSequence:
    """Per-frame stochastic replacement of frames by their aligned tokens.

    Frame ``i`` keeps its speech embedding when its uniform draw exceeds
    ``p_star`` and takes ``tokens[assignment[i]]`` otherwise. ``p_star = 0``
    always returns the frames (including on a draw of exactly zero) and
    ``p_star = 1`` always returns the aligned tokens. Identical seed and
    inputs reproduce the output bit for bit.
    """
    assignment = _assignment_for(frames, tokens, path)
    rng = np.random.default_rng(config.rng_seed)
    draws = rng.random(frames.length)
    take_token = (draws <= config.p_star) & (config.p_star > 0.0)
    mixed = np.where(take_token[:, None], tokens.data[assignment], frames.data)
    return MixupSequence(mixed)


def interpolation_mixup(
    frames: EmbeddingSequence,
    tokens: EmbeddingSequence,
    path,
    p_star: float,
) -> MixupSequence:
    """Deterministic convex blend of each frame with its aligned token.

    The endpoints are short-circuited so ``p_star = 0`` returns the frames
    and ``p_star = 1`` the aligned tokens bit-exactly.
    """
    if not 0.0 <= p_star <= 1.0:
        raise ValueError(f"p_star must lie in [0, 1], got {p_star}")
    assignment = _assignment_for(frames, tokens, path)
    if p_star == 0.0:
        return MixupSequence(frames.data.copy())
    aligned = tokens.data[assignment]
    if p_star == 1.0:
        return MixupSequence(aligned.copy())
    mixed = (1.0 - p_star) * frames.data + p_star * aligned
    return MixupSequence(mixed)
