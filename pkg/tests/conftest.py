"""Shared helpers for building random test inputs."""

import numpy as np

from alignkit import EmbeddingSequence, SimilarityMatrix


def make_sequence(rng, length, dim):
    return EmbeddingSequence(rng.standard_normal((length, dim)).astype(np.float32))


def make_pair(rng, n_frames=None, n_tokens=None, dim=None):
    """A random (frames, tokens) pair with n_frames >= n_tokens."""
    if n_frames is None:
        n_frames = int(rng.integers(1, 65))
    if n_tokens is None:
        n_tokens = int(rng.integers(1, min(n_frames, 16) + 1))
    if dim is None:
        dim = int(rng.integers(2, 33))
    return make_sequence(rng, n_frames, dim), make_sequence(rng, n_tokens, dim)


def make_similarity(rng, n_frames, n_tokens):
    return SimilarityMatrix(rng.standard_normal((n_frames, n_tokens)).astype(np.float32))


def comparator_reads(trellis_values, assignment):
    """Trellis cells the backward comparator consults, per the documented rule.

    At each step t (from the second-to-last frame down), the comparator looks
    at the cells below and at the token carried in from frame t+1, unless
    that token is 0 where no comparison happens.
    """
    reads = []
    for t in range(len(assignment) - 2, -1, -1):
        j = int(assignment[t + 1])
        if j > 0:
            reads.append(trellis_values[t, j - 1])
            reads.append(trellis_values[t, j])
    return reads
