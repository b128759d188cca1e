"""Embedding containers and the frame/token similarity computation.

Embeddings are stored as float32 row-major arrays; dot products and norms
are accumulated in float64 before the result is rounded back to float32.
Similarity rows are computed independently of each other (element reductions
run over the embedding axis only), so any row slice of the output equals the
output computed on the corresponding subsequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyInput, EmptySequence

__all__ = [
    "EmbeddingSequence",
    "MixupSequence",
    "SimilarityMatrix",
    "cosine_similarity_matrix",
    "pad_batch",
    "unpad_batch",
]


@dataclass
class EmbeddingSequence:
    """A length x dim sequence of real vectors (speech frames or token embeddings).

    ``data`` is coerced to a C-contiguous float32 array. All values must be
    finite; degenerate (all-zero) vectors are allowed and handled downstream.
    Instances are treated as immutable.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D (length, dim) array, got shape {arr.shape}")
        if arr.shape[0] == 0:
            raise EmptySequence("sequence must contain at least one timestep")
        if arr.shape[1] == 0:
            raise EmptySequence("embedding dimension must be positive")
        if not np.all(np.isfinite(arr)):
            raise ValueError("embedding values must be finite (no NaN or infinities)")
        self.data = arr

    @property
    def length(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


class MixupSequence(EmbeddingSequence):
    """A mixed frame sequence; same shape and storage rules as its source frames."""


@dataclass
class SimilarityMatrix:
    """An n_frames x n_tokens matrix of frame/token similarity scores.

    Entries produced by :func:`cosine_similarity_matrix` lie in
    ``[-1 - 1e-5, 1 + 1e-5]``; hand-built matrices may use any finite values.
    NaN entries are rejected.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float32)
        if arr.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D (frames, tokens) array, got shape {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise EmptyInput("similarity matrix must have at least one frame and one token")
        if np.any(np.isnan(arr)):
            raise ValueError("similarity matrix must not contain NaN")
        self.values = arr

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def n_tokens(self) -> int:
        return self.values.shape[1]


def cosine_similarity_matrix(
    frames: EmbeddingSequence, tokens: EmbeddingSequence
) -> SimilarityMatrix:
    """Cosine similarity between every frame and every token embedding.

    A vector with zero norm gets similarity 0.0 against everything, so
    degenerate padding frames never poison downstream dynamic programming.

    The reductions use ``np.einsum`` without path optimization: each output
    element accumulates over the embedding axis in a fixed order, which keeps
    results independent of how many rows are present.

    Raises:
        DimensionMismatch: if the two sequences have different dims.
    """
    if frames.dim != tokens.dim:
        raise DimensionMismatch(
            f"frame dim {frames.dim} does not match token dim {tokens.dim}"
        )
    f = frames.data.astype(np.float64)
    t = tokens.data.astype(np.float64)
    dots = np.einsum("nd,md->nm", f, t)
    f_norm = np.sqrt(np.einsum("nd,nd->n", f, f))
    t_norm = np.sqrt(np.einsum("md,md->m", t, t))
    denom = np.outer(f_norm, t_norm)
    nonzero = denom > 0.0
    values = np.where(nonzero, dots / np.where(nonzero, denom, 1.0), 0.0)
    return SimilarityMatrix(values.astype(np.float32))


def pad_batch(
    sequences: list[EmbeddingSequence],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack variable-length sequences into a zero-padded batch tensor.

    Returns:
        batch: float32 array of shape (batch, max_length, dim).
        lengths: int64 array with each item's true length.
        mask: bool array of shape (batch, max_length), True on valid steps.

    Raises:
        EmptyInput: on an empty list.
        DimensionMismatch: if items disagree on the embedding dim.
    """
    if not sequences:
        raise EmptyInput("cannot pad an empty batch")
    dim = sequences[0].dim
    for i, seq in enumerate(sequences):
        if seq.dim != dim:
            raise DimensionMismatch(f"item {i} has dim {seq.dim}, expected {dim}")
    lengths = np.array([seq.length for seq in sequences], dtype=np.int64)
    max_len = int(lengths.max())
    batch = np.zeros((len(sequences), max_len, dim), dtype=np.float32)
    mask = np.zeros((len(sequences), max_len), dtype=bool)
    for i, seq in enumerate(sequences):
        batch[i, : seq.length] = seq.data
        mask[i, : seq.length] = True
    return batch, lengths, mask


def unpad_batch(batch: np.ndarray, lengths: np.ndarray) -> list[EmbeddingSequence]:
    """Invert :func:`pad_batch`; round-trips the input sequences bit-exactly."""
    return [EmbeddingSequence(batch[i, : int(n)].copy()) for i, n in enumerate(lengths)]
