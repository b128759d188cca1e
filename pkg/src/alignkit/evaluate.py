"""Alignment validation, accuracy scoring, and synthetic ground truth.

``validate_path`` checks any per-frame assignment against the structural
contract (monotone, surjective, correct endpoints) and reports what failed.
``accuracy`` scores predicted alignments against references by frame-level
agreement, reporting both a pooled (micro) and a per-utterance-mean (macro)
figure, since reference conventions differ on the granularity.

``synth_planted`` manufactures embedding pairs with a known alignment:
orthonormal token vectors, a random monotone surjective assignment, and
noisy copies of the assigned token as frames. It exists because real encoder
dumps are not shippable; the planted truth makes accuracy exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DimensionTooSmall, TooFewFrames
from .sequences import EmbeddingSequence

__all__ = [
    "ValidationReport",
    "ReferenceAlignment",
    "AccuracyReport",
    "validate_path",
    "accuracy",
    "project_tokens_to_words",
    "synth_planted",
]


@dataclass
class ValidationReport:
    """Outcome of checking one assignment against the structural contract."""

    monotonic: bool
    surjective: bool
    starts_at_zero: bool
    ends_at_last: bool
    first_violation_index: int | None
    skipped_tokens: list[int]

    @property
    def all_ok(self) -> bool:
        return (
            self.monotonic and self.surjective and self.starts_at_zero and self.ends_at_last
        )


@dataclass
class ReferenceAlignment:
    """A ground-truth per-frame assignment from an external source."""

    assignment: np.ndarray
    n_tokens: int

    def __post_init__(self):
        self.assignment = np.ascontiguousarray(self.assignment, dtype=np.int64)

    @property
    def n_frames(self) -> int:
        return self.assignment.shape[0]


@dataclass
class AccuracyReport:
    """Frame-agreement accuracy, pooled and per utterance.

    ``micro_frame_accuracy`` pools all frames (equivalently, the
    frame-weighted mean of per-utterance accuracies);
    ``macro_utterance_accuracy`` averages utterances with equal weight.
    ``skipped`` lists (id, reason) pairs for utterances that could not be
    scored, e.g. length mismatches.
    """

    micro_frame_accuracy: float
    macro_utterance_accuracy: float
    per_utterance: list[tuple[str, float, int]]
    n_utterances: int
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "micro_frame_accuracy": self.micro_frame_accuracy,
            "macro_utterance_accuracy": self.macro_utterance_accuracy,
            "n_utterances": self.n_utterances,
            "n_skipped": len(self.skipped),
            "per_utterance": [
                {"id": uid, "accuracy": acc, "n_frames": n}
                for uid, acc, n in self.per_utterance
            ],
            "skipped": [{"id": uid, "reason": reason} for uid, reason in self.skipped],
        }


def validate_path(assignment, n_tokens: int) -> ValidationReport:
    """Check monotonicity, coverage, and endpoints of a per-frame assignment.

    Total: never raises on integer input; see the report fields for what
    failed and where (``first_violation_index`` is the first frame whose
    token index decreased).
    """
    a = np.asarray(assignment, dtype=np.int64)
    drops = np.nonzero(np.diff(a) < 0)[0]
    monotonic = drops.size == 0
    covered = set(int(j) for j in np.unique(a))
    skipped = [j for j in range(n_tokens) if j not in covered]
    return ValidationReport(
        monotonic=bool(monotonic),
        surjective=not skipped,
        starts_at_zero=bool(a[0] == 0),
        ends_at_last=bool(a[-1] == n_tokens - 1),
        first_violation_index=None if monotonic else int(drops[0] + 1),
        skipped_tokens=skipped,
    )


def accuracy(
    predicted: Mapping[str, np.ndarray],
    reference: Mapping[str, np.ndarray],
) -> AccuracyReport:
    """Frame-level agreement of predicted vs. reference assignments.

    Utterances are matched by id over the prediction set; ids missing from
    the reference or with mismatched frame counts are skipped and recorded.
    """
    per_utterance: list[tuple[str, float, int]] = []
    skipped: list[tuple[str, str]] = []
    correct_total = 0
    frames_total = 0
    for uid, pred in predicted.items():
        if uid not in reference:
            skipped.append((uid, "missing reference"))
            continue
        pred_arr = np.asarray(pred, dtype=np.int64)
        ref_arr = np.asarray(reference[uid], dtype=np.int64)
        if pred_arr.shape != ref_arr.shape:
            skipped.append(
                (uid, f"length mismatch: {pred_arr.shape[0]} vs {ref_arr.shape[0]}")
            )
            continue
        n = int(pred_arr.shape[0])
        correct = int((pred_arr == ref_arr).sum())
        per_utterance.append((uid, correct / n, n))
        correct_total += correct
        frames_total += n
    micro = correct_total / frames_total if frames_total else 0.0
    macro = (
        float(np.mean([acc for _, acc, _ in per_utterance])) if per_utterance else 0.0
    )
    return AccuracyReport(
        micro_frame_accuracy=micro,
        macro_utterance_accuracy=macro,
        per_utterance=per_utterance,
        n_utterances=len(per_utterance),
        skipped=skipped,
    )


def project_tokens_to_words(assignment, tokens_per_word) -> np.ndarray:
    """Map a token-level assignment to word level via per-word token counts.

    ``tokens_per_word[w]`` is the number of tokens that make up word ``w``;
    token ``j`` belongs to the word whose token range contains ``j``. Used
    when the reference aligner reports words while predictions use tokens.
    """
    counts = np.asarray(tokens_per_word, dtype=np.int64)
    if counts.ndim != 1 or counts.size == 0 or counts.min() < 1:
        raise ValueError("tokens_per_word must be a non-empty vector of positive counts")
    token_to_word = np.repeat(np.arange(counts.size), counts)
    a = np.asarray(assignment, dtype=np.int64)
    if a.size and (a.min() < 0 or a.max() >= token_to_word.size):
        raise ValueError(
            f"assignment indices must lie in [0, {token_to_word.size - 1}]"
        )
    return token_to_word[a]


def synth_planted(
    n_frames: int,
    n_tokens: int,
    dim: int,
    noise: float,
    seed: int,
) -> tuple[EmbeddingSequence, EmbeddingSequence, ReferenceAlignment]:
    """Generate a frame/token pair with a known planted alignment.

    Tokens are random orthonormal vectors; a random monotone surjective
    assignment is drawn; each frame is its assigned token plus isotropic
    Gaussian noise of scale ``noise``. Deterministic for a given seed.

    Raises:
        TooFewFrames: if ``n_frames < n_tokens``.
        DimensionTooSmall: if ``dim < n_tokens`` (orthonormality impossible).
    """
    if n_frames < n_tokens:
        raise TooFewFrames(f"need at least {n_tokens} frames, got {n_frames}")
    if dim < n_tokens:
        raise DimensionTooSmall(
            f"dim {dim} cannot host {n_tokens} orthonormal token vectors"
        )
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((dim, n_tokens)))
    token_vecs = basis.T  # (n_tokens, dim), orthonormal rows
    if n_tokens > 1:
        transitions = np.sort(
            rng.choice(np.arange(1, n_frames), size=n_tokens - 1, replace=False)
        )
    else:
        transitions = np.empty(0, dtype=np.int64)
    planted = np.searchsorted(transitions, np.arange(n_frames), side="right")
    frame_vecs = token_vecs[planted] + noise * rng.standard_normal((n_frames, dim))
    frames = EmbeddingSequence(frame_vecs.astype(np.float32))
    tokens = EmbeddingSequence(token_vecs.astype(np.float32))
    return frames, tokens, ReferenceAlignment(assignment=planted, n_tokens=n_tokens)
