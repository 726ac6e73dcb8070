"""Exception hierarchy shared by the walk, continuum and CLI layers."""


class WalkError(Exception):
    """Base class for all errors raised by :mod:`tdcoin`."""


class ParameterError(WalkError, ValueError):
    """An argument is outside the domain accepted by an operation."""


class ExtentError(WalkError, RuntimeError):
    """Amplitude reached the edge of a finite line lattice.

    Signals that the lattice was allocated with fewer sites than the run needs.
    """


class AccuracyError(WalkError, ArithmeticError):
    """A numerical routine failed to reach its accuracy target."""

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class DomainError(WalkError, ValueError):
    """Closed-form evaluation requested where it is ill-conditioned."""


class AiryRangeError(WalkError, OverflowError):
    """Ai(z) exceeds the double-precision range."""
