"""alignkit: monotonic frame-to-token sequence alignment.

A toolkit for aligning a long sequence of frame embeddings to a short
sequence of token embeddings with a constrained dynamic-time-warping pass
that guarantees monotone, fully covering, one-token-per-frame paths. Ships
with an entropic optimal-transport baseline, mixup construction on top of
alignments, the numeric training-objective kernels, evaluation against
reference alignments, a timing harness, and a CLI with bit-exact file
formats.
"""

from .bench import BenchResult, make_synthetic_workload, run_bench, speedup
from .dtw import (
    AlignmentPath,
    BatchItemError,
    Trellis,
    align,
    align_batch,
    backtrack,
    brute_force_align,
    build_trellis,
)
from .errors import (
    AlignmentError,
    BudgetExceeded,
    DimensionMismatch,
    DimensionTooSmall,
    EmptyInput,
    EmptySequence,
    FormatError,
    IndexOutOfRange,
    LengthMismatch,
    NumericalUnderflow,
    PathMismatch,
    ShapeMismatch,
    TooFewFrames,
)
from .evaluate import (
    AccuracyReport,
    ReferenceAlignment,
    ValidationReport,
    accuracy,
    project_tokens_to_words,
    synth_planted,
    validate_path,
)
from .io import (
    read_alignment_file,
    read_alignment_map,
    read_embedding_file,
    write_alignment_file,
    write_embedding_file,
)
from .mixup import MixupConfig, discrete_mixup, interpolation_mixup
from .objectives import (
    DistributionTable,
    ObjectiveConfig,
    cross_entropy,
    kl_divergence,
    symmetric_kl,
    total_loss,
)
from .ot import (
    SinkhornConfig,
    TransportPlan,
    UnconstrainedAssignment,
    ot_align,
    plan_to_alignment,
    similarity_to_cost,
    sinkhorn,
)
from .sequences import (
    EmbeddingSequence,
    MixupSequence,
    SimilarityMatrix,
    cosine_similarity_matrix,
    pad_batch,
    unpad_batch,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "AlignmentError",
    "AlignmentPath",
    "BatchItemError",
    "BenchResult",
    "BudgetExceeded",
    "DimensionMismatch",
    "DimensionTooSmall",
    "DistributionTable",
    "EmbeddingSequence",
    "EmptyInput",
    "EmptySequence",
    "FormatError",
    "IndexOutOfRange",
    "LengthMismatch",
    "MixupConfig",
    "MixupSequence",
    "NumericalUnderflow",
    "ObjectiveConfig",
    "PathMismatch",
    "ReferenceAlignment",
    "ShapeMismatch",
    "SimilarityMatrix",
    "SinkhornConfig",
    "TooFewFrames",
    "TransportPlan",
    "Trellis",
    "UnconstrainedAssignment",
    "ValidationReport",
    "accuracy",
    "align",
    "align_batch",
    "backtrack",
    "brute_force_align",
    "build_trellis",
    "cosine_similarity_matrix",
    "cross_entropy",
    "discrete_mixup",
    "interpolation_mixup",
    "kl_divergence",
    "make_synthetic_workload",
    "ot_align",
    "pad_batch",
    "plan_to_alignment",
    "project_tokens_to_words",
    "read_alignment_file",
    "read_alignment_map",
    "read_embedding_file",
    "run_bench",
    "similarity_to_cost",
    "sinkhorn",
    "speedup",
    "symmetric_kl",
    "synth_planted",
    "total_loss",
    "unpad_batch",
    "validate_path",
    "write_alignment_file",
    "write_embedding_file",
]
