"""Exception hierarchy shared by every layer of the package."""


class JCMError(Exception):
    """Base class for all package errors."""


class CapacityError(JCMError):
    """Requested Hilbert space would exceed the dense-matrix memory budget."""


class DomainError(JCMError, ValueError):
    """An argument lies outside the domain of the operation."""


class TruncationError(JCMError):
    """A state cannot be represented faithfully within the photon cutoffs."""

    def __init__(self, message, min_cutoff=None):
        super().__init__(message)
        self.min_cutoff = min_cutoff


class ResonanceError(JCMError):
    """A coupled mode is exactly resonant, so the dispersive construction is undefined."""


class NumericError(JCMError):
    """A dense linear-algebra routine failed to converge."""


class UnsupportedStateError(JCMError):
    """Initial state outside what the effective description handles."""
