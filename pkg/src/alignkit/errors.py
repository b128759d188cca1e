"""Exception types shared across the toolkit."""


class AlignmentError(Exception):
    """Base class for all alignkit errors."""


class DimensionMismatch(AlignmentError):
    """Embedding dimensions of two sequences (or batch items) disagree."""


class EmptySequence(AlignmentError):
    """A sequence with zero timesteps or zero dimensions was supplied."""


class EmptyInput(AlignmentError):
    """A matrix input has a zero-sized axis."""


class TooFewFrames(AlignmentError):
    """The frame sequence is shorter than the token sequence."""


class BudgetExceeded(AlignmentError):
    """Exhaustive enumeration would exceed the configured path budget."""


class PathMismatch(AlignmentError):
    """An alignment does not fit the frame/token pair it is applied to."""


class ShapeMismatch(AlignmentError):
    """Two tables that must share a shape do not."""


class IndexOutOfRange(AlignmentError):
    """A target index lies outside the table's vocabulary."""


class LengthMismatch(AlignmentError):
    """Predicted and reference alignments disagree on the frame count."""


class DimensionTooSmall(AlignmentError):
    """The embedding dimension cannot host the requested construction."""


class NumericalUnderflow(AlignmentError):
    """Scaling iterations degenerated into non-finite values."""


class FormatError(AlignmentError):
    """A file does not conform to the declared container format."""
