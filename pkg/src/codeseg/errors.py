"""Exception and warning types shared across the toolkit."""


class CodesegError(Exception):
    """Base class for all toolkit errors."""


# -- corpus ------------------------------------------------------------------

class MalformedRecord(CodesegError):
    """A corpus record is structurally invalid (missing field, bad numbering)."""


class UnknownLabel(CodesegError):
    """A label string is not part of the annotatable taxonomy."""


class EmptyCorpus(CodesegError):
    """No records were found where a corpus was expected."""


class TooFewAnnotators(CodesegError):
    """Fewer than three annotator labels were supplied for voting."""


class RaggedMatrix(CodesegError):
    """Agreement matrix rows do not all sum to the same rater count."""


class EmptyMatrix(CodesegError):
    """A count matrix contains no observations."""


# -- window ------------------------------------------------------------------

class IndexOutOfRange(CodesegError):
    """Requested line index lies outside the file."""


class MissingDemonstrations(CodesegError):
    """Few-shot mode was requested without any demonstrations."""


# -- backends ----------------------------------------------------------------

class BackendUnavailable(CodesegError):
    """The backend could not produce a response after bounded retries."""


class BackendTimeout(CodesegError):
    """The backend did not respond within the configured timeout."""


class EmptyTrainingSet(CodesegError):
    """No labeled windows were available for training."""


class UnlabeledLine(CodesegError):
    """A training line is missing its gold label."""


class DimensionMismatch(CodesegError):
    """Feature dimensionality does not match the model's weight matrix."""


class EmptyPool(CodesegError):
    """The demonstration pool is empty."""


# -- rangeseg ----------------------------------------------------------------

class NoRangesFound(CodesegError):
    """A range-based response contained no parseable line ranges."""


class ValidationFailed(CodesegError):
    """Strict repair refused a span set with gaps, overlaps, or bounds defects."""


class CoverageViolation(CodesegError):
    """Spans do not cover the line interval exactly once."""


# -- segment / eval ----------------------------------------------------------

class EmptyInput(CodesegError):
    """An operation that needs at least one element received none."""


class LengthMismatch(CodesegError):
    """Paired sequences have different lengths."""


class TooFewFiles(CodesegError):
    """Per-file statistics need at least two files."""


class InvalidGold(CodesegError):
    """A gold label sequence contains the Invalid marker."""


class MissingPredictions(CodesegError):
    """Some evaluated lines have no prediction."""


# -- warnings ----------------------------------------------------------------

class CodesegWarning(UserWarning):
    """Base class for documented non-fatal conventions."""


class LeadingBracketLine(CodesegWarning):
    """A bracket-only first line has no preceding line and was kept as-is."""


class TargetExceedsBudget(CodesegWarning):
    """A target line alone exceeded the token budget and was tail-truncated."""
