"""Constrained dynamic time warping of frames onto tokens.

Aligns a long frame sequence (length N) to a short token sequence (length M,
M <= N) under three structural constraints: token indices never decrease over
time, every token receives at least one frame, and each frame maps to exactly
one token. Only the token axis is warped, giving a one-to-many relationship
from tokens to frames.

The dynamic program fills an N x M trellis of best-prefix scores row by row:

* row 0 holds the similarity of frame 0 to token 0 and ``-inf`` elsewhere,
  which propagates ``-inf`` through every cell with ``j > t`` (a frame cannot
  sit on a token it has not had time to reach);
* column 0 accumulates similarity while staying on the first token, but is
  stamped ``+inf`` once fewer frames remain than tokens still to cover
  (``t > N - M``); through the row maximum this stamp spreads over every cell
  with ``t - j > N - M``, the region where the path has fallen too far behind
  to finish;
* all other cells take the better of "stay on this token" and "advance by
  one token" from the previous row, plus the local similarity.

Backtracking starts at the last frame on the last token and steps backwards,
moving down a token only on a strict improvement. It provably touches finite
cells only; the infinite cells mark infeasible states and are never read.

``align_batch`` runs the same recursion as a row wave across a whole batch
(vectorized over the batch and token axes) and backtracks all items in
lockstep with per-item length masks. Results are bitwise identical to the
per-item functions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlignmentError,
    BudgetExceeded,
    EmptyInput,
    TooFewFrames,
)
from .sequences import EmbeddingSequence, SimilarityMatrix, cosine_similarity_matrix

__all__ = [
    "Trellis",
    "AlignmentPath",
    "BatchItemError",
    "build_trellis",
    "backtrack",
    "align",
    "align_batch",
    "brute_force_align",
    "PATH_BUDGET",
]

# Exhaustive enumeration refuses to walk more than this many candidate paths.
PATH_BUDGET = 10**6


@dataclass
class Trellis:
    """Best-prefix score table; float64 with ``+inf``/``-inf`` boundary cells."""

    values: np.ndarray

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def n_tokens(self) -> int:
        return self.values.shape[1]


@dataclass
class AlignmentPath:
    """A frame-to-token assignment with the structural guarantees enforced.

    ``assignment[t]`` is the token index of frame ``t``. Construction checks
    monotone steps in {0, 1}, the start/end boundary conditions, and full
    token coverage; ``score`` is the summed similarity along the path.
    """

    assignment: np.ndarray
    n_tokens: int
    score: float

    def __post_init__(self):
        a = np.ascontiguousarray(self.assignment, dtype=np.int64)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("assignment must be a non-empty 1-D index vector")
        steps = np.diff(a)
        if a[0] != 0:
            raise ValueError("path must start on token 0")
        if a[-1] != self.n_tokens - 1:
            raise ValueError("path must end on the last token")
        if steps.size and (steps.min() < 0 or steps.max() > 1):
            raise ValueError("token index must advance by 0 or 1 per frame")
        if np.unique(a).size != self.n_tokens:
            raise ValueError("every token must receive at least one frame")
        self.assignment = a

    @property
    def n_frames(self) -> int:
        return self.assignment.shape[0]


@dataclass
class BatchItemError:
    """Per-item failure record emitted by :func:`align_batch`."""

    index: int
    kind: str
    message: str


def _as_similarity_values(sim) -> np.ndarray:
    values = getattr(sim, "values", sim)
    return np.asarray(values)


def build_trellis(sim: SimilarityMatrix) -> Trellis:
    """Fill the best-prefix score trellis for one similarity matrix.

    Accepts a :class:`SimilarityMatrix` or a plain 2-D array. Scores
    accumulate in float64 regardless of the input precision.

    Raises:
        EmptyInput: if either axis has size zero.
        TooFewFrames: if there are fewer frames than tokens.
    """
    s = _as_similarity_values(sim).astype(np.float64)
    if s.ndim != 2:
        raise EmptyInput(f"expected a 2-D similarity matrix, got shape {s.shape}")
    n_frames, n_tokens = s.shape
    if n_frames == 0 or n_tokens == 0:
        raise EmptyInput("similarity matrix must have at least one frame and one token")
    if n_frames < n_tokens:
        raise TooFewFrames(
            f"cannot cover {n_tokens} tokens with only {n_frames} frames"
        )
    slack = n_frames - n_tokens
    trellis = np.empty((n_frames, n_tokens), dtype=np.float64)
    trellis[0, 0] = s[0, 0]
    trellis[0, 1:] = -np.inf
    for t in range(1, n_frames):
        prev = trellis[t - 1]
        trellis[t, 1:] = np.maximum(prev[1:], prev[:-1]) + s[t, 1:]
        trellis[t, 0] = np.inf if t > slack else prev[0] + s[t, 0]
    return Trellis(trellis)


def backtrack(trellis: Trellis) -> AlignmentPath:
    """Recover the best path from a filled trellis.

    Starts on the last token at the last frame and walks backwards, stepping
    down a token only when the lower neighbour is strictly better. On a tie
    the path stays on the current (higher) token, which is equivalent to
    entering each token as early as possible in frame order. The reported
    score equals the similarity summed along the returned path (frame order,
    float64), which is exactly the final trellis cell.
    """
    values = trellis.values
    n_frames, n_tokens = values.shape
    assignment = np.empty(n_frames, dtype=np.int64)
    cur = n_tokens - 1
    assignment[-1] = cur
    for t in range(n_frames - 2, -1, -1):
        if cur > 0 and values[t, cur - 1] > values[t, cur]:
            cur -= 1
        assignment[t] = cur
    return AlignmentPath(
        assignment=assignment,
        n_tokens=n_tokens,
        score=float(values[n_frames - 1, n_tokens - 1]),
    )


def align(frames: EmbeddingSequence, tokens: EmbeddingSequence) -> AlignmentPath:
    """Cosine similarity + trellis + backtracking for one frame/token pair."""
    return backtrack(build_trellis(cosine_similarity_matrix(frames, tokens)))


def align_batch(
    pairs: list[tuple[EmbeddingSequence, EmbeddingSequence]],
) -> list[AlignmentPath | BatchItemError]:
    """Align every (frames, tokens) pair of a batch.

    Invalid items (dimension mismatch, too few frames, ...) produce a
    :class:`BatchItemError` at their position instead of aborting the batch.
    Valid items are processed through one batched trellis/backtracking pass
    and are bitwise identical to calling :func:`align` on them individually.
    """
    results: list[AlignmentPath | BatchItemError] = [None] * len(pairs)  # type: ignore[list-item]
    sims: list[SimilarityMatrix] = []
    kept: list[int] = []
    for i, (frames, tokens) in enumerate(pairs):
        try:
            sim = cosine_similarity_matrix(frames, tokens)
            if sim.n_frames < sim.n_tokens:
                raise TooFewFrames(
                    f"cannot cover {sim.n_tokens} tokens with only {sim.n_frames} frames"
                )
        except AlignmentError as exc:
            results[i] = BatchItemError(index=i, kind=type(exc).__name__, message=str(exc))
            continue
        kept.append(i)
        sims.append(sim)
    if sims:
        for i, path in zip(kept, _align_many(sims)):
            results[i] = path
    return results


def _align_many(sims: list[SimilarityMatrix]) -> list[AlignmentPath]:
    """Batched trellis fill and backtracking over padded similarity stacks."""
    batch = len(sims)
    n_frames = np.array([s.n_frames for s in sims], dtype=np.int64)
    n_tokens = np.array([s.n_tokens for s in sims], dtype=np.int64)
    max_n = int(n_frames.max())
    max_m = int(n_tokens.max())
    slack = n_frames - n_tokens

    sim_pad = np.zeros((batch, max_n, max_m), dtype=np.float64)
    for b, s in enumerate(sims):
        sim_pad[b, : s.n_frames, : s.n_tokens] = s.values.astype(np.float64)

    trellis = np.full((batch, max_n, max_m), -np.inf, dtype=np.float64)
    trellis[:, 0, 0] = sim_pad[:, 0, 0]
    neg_col = np.full((batch, 1), -np.inf)
    for t in range(1, max_n):
        prev = trellis[:, t - 1, :]
        advanced = np.concatenate([neg_col, prev[:, :-1]], axis=1)
        row = np.maximum(prev, advanced) + sim_pad[:, t, :]
        row[:, 0] = np.where(t > slack, np.inf, row[:, 0])
        trellis[:, t, :] = row

    batch_idx = np.arange(batch)
    assignment = np.empty((batch, max_n), dtype=np.int64)
    cur = n_tokens - 1
    for t in range(max_n - 1, -1, -1):
        live = t <= n_frames - 2
        t_safe = np.minimum(t, n_frames - 1)
        lower = trellis[batch_idx, t_safe, np.maximum(cur - 1, 0)]
        here = trellis[batch_idx, t_safe, cur]
        cur = np.where(live & (cur > 0) & (lower > here), cur - 1, cur)
        assignment[:, t] = cur

    scores = trellis[batch_idx, n_frames - 1, n_tokens - 1]
    return [
        AlignmentPath(
            assignment=assignment[b, : int(n_frames[b])].copy(),
            n_tokens=int(n_tokens[b]),
            score=float(scores[b]),
        )
        for b in range(batch)
    ]


def _iter_transition_sets(n_frames: int, n_tokens: int):
    """Yield every strictly increasing set of token-entry frames.

    A path is identified by the frames at which it advances to the next
    token; choosing ``n_tokens - 1`` such frames out of ``1..n_frames - 1``
    enumerates exactly the monotone, surjective, boundary-respecting paths.
    """
    return itertools.combinations(range(1, n_frames), n_tokens - 1)


def brute_force_align(sim: SimilarityMatrix) -> AlignmentPath:
    """Exhaustive oracle: best path by full enumeration.

    Scores every feasible path with the same float64 frame-order summation
    the trellis uses. Ties are broken exactly like :func:`backtrack`: among
    equal-score paths, prefer the one whose entry frame into the last token
    is smallest, then into the second-to-last token, and so on.

    Raises:
        BudgetExceeded: if the number of paths exceeds :data:`PATH_BUDGET`.
    """
    s = _as_similarity_values(sim).astype(np.float64)
    if s.ndim != 2 or s.shape[0] == 0 or s.shape[1] == 0:
        raise EmptyInput("similarity matrix must have at least one frame and one token")
    n_frames, n_tokens = s.shape
    if n_frames < n_tokens:
        raise TooFewFrames(
            f"cannot cover {n_tokens} tokens with only {n_frames} frames"
        )
    n_paths = math.comb(n_frames - 1, n_tokens - 1)
    if n_paths > PATH_BUDGET:
        raise BudgetExceeded(f"{n_paths} candidate paths exceed budget {PATH_BUDGET}")

    frame_idx = np.arange(n_frames)
    best_score = -np.inf
    best_key: tuple[int, ...] | None = None
    best_assignment: np.ndarray | None = None
    transition_iter = _iter_transition_sets(n_frames, n_tokens)
    while True:
        chunk = list(itertools.islice(transition_iter, 4096))
        if not chunk:
            break
        transitions = np.asarray(chunk, dtype=np.int64).reshape(len(chunk), n_tokens - 1)
        assignments = (transitions[:, :, None] <= frame_idx[None, None, :]).sum(axis=1)
        path_values = s[frame_idx[None, :], assignments]
        scores = np.cumsum(path_values, axis=1)[:, -1]
        for p in range(len(chunk)):
            key = tuple(reversed(chunk[p]))
            score = float(scores[p])
            if (
                best_assignment is None
                or score > best_score
                or (score == best_score and key < best_key)
            ):
                best_score = score
                best_key = key
                best_assignment = assignments[p]
    assert best_assignment is not None
    return AlignmentPath(
        assignment=best_assignment, n_tokens=n_tokens, score=best_score
    )
