"""Exception types shared across the toolkit."""


class SpecrexError(Exception):
    """Base class for every toolkit error."""


class NonFiniteError(SpecrexError):
    """An intensity or map array contains NaN or infinity."""


class AxisMismatchError(SpecrexError):
    """Array length or axis metadata disagrees with the expected wavenumber axis."""


class BadIntervalError(SpecrexError):
    """A wavenumber interval is malformed, out of range, or overlaps a neighbour."""


class ParseError(SpecrexError):
    """A data file could not be parsed. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class DuplicateAnchorError(SpecrexError):
    """Two baseline anchors share the same x position."""


class TooFewAnchorsError(SpecrexError):
    """A spline needs at least two anchors."""


class PlacementFailureError(SpecrexError):
    """A faux peak position satisfying the separation rule was not found."""


class WindowOutOfRangeError(SpecrexError):
    """A matched-filter window extends beyond the wavenumber axis."""


class UnsplittableError(SpecrexError):
    """An interval is too narrow to split into two segments of the minimum size."""


class TargetUnstableError(SpecrexError):
    """The classifier no longer assigns the requested target label to the input."""


class BudgetExhaustedError(SpecrexError):
    """The classifier query budget ran out before the operation finished."""


class NoSufficientSetError(SpecrexError):
    """No retained subset, not even the full spectrum, keeps the target label."""


class SpawnError(SpecrexError):
    """An external classifier process could not be started."""


class HandshakeError(SpecrexError):
    """The external classifier handshake failed or disagreed on the class count."""


class ExternalProtocolError(SpecrexError):
    """An external classifier sent a malformed, late, or out-of-order message."""


class IdMismatchError(SpecrexError):
    """Map, explanation, and dataset ids do not line up."""


class EmptyInputError(SpecrexError):
    """No input records were found."""


class MissingGroundTruthError(SpecrexError):
    """The operation needs ground-truth intervals but the spectrum has none."""
