"""Exception types shared across the package."""


class CPCError(Exception):
    """Base class for all cpcsim errors."""


class InvalidArgument(CPCError, ValueError):
    pass


class TruncationError(CPCError, ValueError):
    """Requested cutoff would discard more probability than the tolerance allows."""


class EmptyProjection(CPCError):
    """A projection or herald left no surviving probability."""

    def __init__(self, message="projection has zero surviving probability"):
        super().__init__(message)


class InconsistentBasis(CPCError, ValueError):
    """Basis is not closed under the coupling."""


class CircuitFileError(CPCError, ValueError):
    """Problem parsing a circuit description file; message carries the location."""
