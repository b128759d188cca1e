"""Timing harness comparing the trellis aligner against the transport baseline.

One benchmarked "pass" aligns every pair of a dataset with the requested
method. Warmup passes run untimed; the timed passes are wall-clocked with a
monotonic clock, and the harness checks that every pass produced identical
assignments (the kernels are deterministic; a mismatch aborts with a
diagnostic). Timing runs the plain in-process kernels with no driver-level
parallelism so the two methods are compared on equal footing.

Absolute numbers are machine-dependent; only the relative comparison on the
fixed synthetic workload is meaningful across machines.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .dtw import AlignmentPath, BatchItemError, align_batch
from .errors import EmptyInput
from .ot import SinkhornConfig, ot_align
from .sequences import EmbeddingSequence

__all__ = [
    "BenchResult",
    "run_bench",
    "speedup",
    "make_synthetic_workload",
    "dtw_assignments",
    "ot_assignments",
    "STANDARD_WORKLOAD",
]

# Fixed synthetic workload so numbers are comparable (in relative terms)
# across machines: 64 pairs of N=512 frames, M=32 tokens, dim 512, seed 42.
STANDARD_WORKLOAD = {"pairs": 64, "n_frames": 512, "n_tokens": 32, "dim": 512, "seed": 42}


@dataclass
class BenchResult:
    """Timing summary for one method over one dataset.

    ``total_seconds`` is the summed wall time of all timed passes;
    ``per_pair_ms`` is ``1000 * total_seconds / (pairs * timed_runs)``.
    ``median_pass_seconds`` is the headline median-of-passes figure.
    """

    method: str
    total_seconds: float
    pairs: int
    per_pair_ms: float
    shape_stats: tuple[float, float, int]
    warmup_runs: int
    timed_runs: int
    median_pass_seconds: float
    pass_seconds: list[float] = field(default_factory=list)
    cold_start: bool = False

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "total_seconds": self.total_seconds,
            "pairs": self.pairs,
            "per_pair_ms": self.per_pair_ms,
            "shape_stats": {
                "mean_n_frames": self.shape_stats[0],
                "mean_n_tokens": self.shape_stats[1],
                "dim": self.shape_stats[2],
            },
            "warmup_runs": self.warmup_runs,
            "timed_runs": self.timed_runs,
            "median_pass_seconds": self.median_pass_seconds,
            "pass_seconds": self.pass_seconds,
            "cold_start": self.cold_start,
            "time_unit": "seconds",
        }


def make_synthetic_workload(
    pairs: int = 64,
    n_frames: int = 512,
    n_tokens: int = 32,
    dim: int = 512,
    seed: int = 42,
) -> list[tuple[EmbeddingSequence, EmbeddingSequence]]:
    """Random embedding pairs of a fixed shape for timing runs."""
    rng = np.random.default_rng(seed)
    dataset = []
    for _ in range(pairs):
        frames = EmbeddingSequence(rng.standard_normal((n_frames, dim)).astype(np.float32))
        tokens = EmbeddingSequence(rng.standard_normal((n_tokens, dim)).astype(np.float32))
        dataset.append((frames, tokens))
    return dataset


def dtw_assignments(dataset) -> list[np.ndarray]:
    """One full trellis-aligner pass; fails loudly on any bad item."""
    out = []
    for item in align_batch(list(dataset)):
        if isinstance(item, BatchItemError):
            raise RuntimeError(
                f"benchmark aborted: item {item.index} failed with "
                f"{item.kind}: {item.message}"
            )
        out.append(item.assignment)
    return out


def ot_assignments(dataset, config: SinkhornConfig | None = None) -> list[np.ndarray]:
    """One full transport-baseline pass (plan + per-frame argmax per pair)."""
    config = config or SinkhornConfig()
    return [ot_align(frames, tokens, config).assignment for frames, tokens in dataset]


def run_bench(
    dataset,
    method: str,
    method_config: SinkhornConfig | None = None,
    warmup: int = 1,
    repeats: int = 3,
) -> BenchResult:
    """Time repeated full-dataset passes of one method.

    Args:
        dataset: sequence of (frames, tokens) pairs.
        method: "dtw" or "ot".
        method_config: Sinkhorn settings for the "ot" method.
        warmup: untimed passes before measuring; 0 flags the result cold-start.
        repeats: timed passes, at least 3.

    Raises:
        ValueError: on an unknown method or repeats < 3.
        EmptyInput: on an empty dataset.
        RuntimeError: if an item fails or passes disagree on their outputs.
    """
    dataset = list(dataset)
    if not dataset:
        raise EmptyInput("benchmark dataset must not be empty")
    if repeats < 3:
        raise ValueError(f"repeats must be at least 3, got {repeats}")
    if method == "dtw":
        runner = dtw_assignments
    elif method == "ot":
        runner = lambda data: ot_assignments(data, method_config)  # noqa: E731
    else:
        raise ValueError(f"unknown method {method!r}; expected 'dtw' or 'ot'")

    for _ in range(warmup):
        runner(dataset)

    reference: list[np.ndarray] | None = None
    pass_seconds: list[float] = []
    for run in range(repeats):
        start = time.perf_counter()
        outputs = runner(dataset)
        pass_seconds.append(time.perf_counter() - start)
        if reference is None:
            reference = outputs
        elif any(not np.array_equal(a, b) for a, b in zip(reference, outputs)):
            raise RuntimeError(
                f"benchmark aborted: pass {run} produced different assignments"
            )

    total = float(sum(pass_seconds))
    n_frames = [frames.length for frames, _ in dataset]
    n_tokens = [tokens.length for _, tokens in dataset]
    return BenchResult(
        method=method,
        total_seconds=total,
        pairs=len(dataset),
        per_pair_ms=1000.0 * total / (len(dataset) * repeats),
        shape_stats=(
            float(np.mean(n_frames)),
            float(np.mean(n_tokens)),
            int(dataset[0][0].dim),
        ),
        warmup_runs=warmup,
        timed_runs=repeats,
        median_pass_seconds=float(statistics.median(pass_seconds)),
        pass_seconds=[float(t) for t in pass_seconds],
        cold_start=warmup == 0,
    )


def speedup(ot_result: BenchResult, dtw_result: BenchResult) -> float:
    """How many times faster the trellis aligner ran: ot total over dtw total."""
    return ot_result.total_seconds / dtw_result.total_seconds
