"""Entropic optimal-transport baseline for frame/token alignment.

Reconstructs the soft-alignment route some systems take instead of dynamic
programming: turn cosine similarity into a cost (``1 - similarity``), solve
an entropy-regularized transport problem between uniform marginals with
Sinkhorn scaling, then harden the plan by per-frame argmax. The hardened
assignment carries none of the structural guarantees of the trellis path:
it can be non-monotonic and can leave tokens without any frame, which is the
failure mode the evaluation module is built to detect.

Updates run in the log domain for stability at small regularization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import EmptyInput, NumericalUnderflow
from .sequences import EmbeddingSequence, SimilarityMatrix, cosine_similarity_matrix

__all__ = [
    "SinkhornConfig",
    "TransportPlan",
    "UnconstrainedAssignment",
    "similarity_to_cost",
    "sinkhorn",
    "plan_to_alignment",
    "ot_align",
]


@dataclass
class SinkhornConfig:
    """Scaling-iteration settings; defaults are conventional entropic-OT values."""

    epsilon: float = 0.1
    max_iters: int = 50
    tol: float = 1e-6

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass
class TransportPlan:
    """A nonnegative coupling with its target marginals and convergence state."""

    plan: np.ndarray
    row_marginal: np.ndarray
    col_marginal: np.ndarray
    iterations_run: int
    converged: bool
    # Row-marginal violation after each full scaling sweep (columns are exact
    # right after their update).
    violation_history: list[float] = field(default_factory=list)

    @property
    def n_frames(self) -> int:
        return self.plan.shape[0]

    @property
    def n_tokens(self) -> int:
        return self.plan.shape[1]


@dataclass
class UnconstrainedAssignment:
    """Per-frame argmax of a transport plan; no structural guarantees.

    ``skipped_tokens`` lists token indices that received no frame at all.
    """

    assignment: np.ndarray
    n_tokens: int
    skipped_tokens: list[int]

    @property
    def n_frames(self) -> int:
        return self.assignment.shape[0]


def similarity_to_cost(sim: SimilarityMatrix) -> np.ndarray:
    """Cost matrix for transport: one minus cosine similarity, float64."""
    return 1.0 - sim.values.astype(np.float64)


def sinkhorn(
    cost: np.ndarray,
    epsilon: float = 0.1,
    max_iters: int = 50,
    tol: float = 1e-6,
) -> TransportPlan:
    """Entropic transport between uniform marginals by log-domain scaling.

    Each frame carries mass ``1/N`` and each token ``1/M``; the plan's
    entries therefore sum to one. Iteration stops once the worst row-marginal
    violation drops below ``tol`` or after ``max_iters`` full sweeps.

    Raises:
        EmptyInput: on a zero-sized cost matrix.
        NumericalUnderflow: if the scaled plan degenerates to non-finite values.
    """
    config = SinkhornConfig(epsilon=epsilon, max_iters=max_iters, tol=tol)
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] == 0 or c.shape[1] == 0:
        raise EmptyInput("cost matrix must be 2-D with both axes non-empty")
    n_frames, n_tokens = c.shape
    row_marginal = np.full(n_frames, 1.0 / n_frames)
    col_marginal = np.full(n_tokens, 1.0 / n_tokens)
    log_mu = np.log(row_marginal)
    log_nu = np.log(col_marginal)

    f = np.zeros(n_frames)
    g = np.zeros(n_tokens)
    plan = np.full_like(c, 1.0 / (n_frames * n_tokens))
    history: list[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iters + 1):
        f = config.epsilon * (log_mu - logsumexp((g[None, :] - c) / config.epsilon, axis=1))
        g = config.epsilon * (log_nu - logsumexp((f[:, None] - c) / config.epsilon, axis=0))
        plan = np.exp((f[:, None] + g[None, :] - c) / config.epsilon)
        violation = float(np.abs(plan.sum(axis=1) - row_marginal).max())
        history.append(violation)
        if violation < config.tol:
            converged = True
            break
    if not np.all(np.isfinite(plan)):
        raise NumericalUnderflow("scaling produced non-finite plan entries")
    return TransportPlan(
        plan=plan,
        row_marginal=row_marginal,
        col_marginal=col_marginal,
        iterations_run=iterations,
        converged=converged,
        violation_history=history,
    )


def plan_to_alignment(plan: TransportPlan) -> UnconstrainedAssignment:
    """Harden a plan by per-frame argmax and report uncovered tokens."""
    assignment = np.argmax(plan.plan, axis=1).astype(np.int64)
    covered = set(int(j) for j in np.unique(assignment))
    skipped = [j for j in range(plan.n_tokens) if j not in covered]
    return UnconstrainedAssignment(
        assignment=assignment, n_tokens=plan.n_tokens, skipped_tokens=skipped
    )


def ot_align(
    frames: EmbeddingSequence,
    tokens: EmbeddingSequence,
    config: SinkhornConfig | None = None,
) -> UnconstrainedAssignment:
    """Full baseline pipeline: cosine cost, Sinkhorn plan, per-frame argmax."""
    config = config or SinkhornConfig()
    sim = cosine_similarity_matrix(frames, tokens)
    plan = sinkhorn(
        similarity_to_cost(sim),
        epsilon=config.epsilon,
        max_iters=config.max_iters,
        tol=config.tol,
    )
    return plan_to_alignment(plan)
