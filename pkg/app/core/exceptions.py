"""
Error hierarchy.
Each branch carries the exit code the command line reports for it:
0 success, 1 infeasible or violation found, 2 invalid input.
"""

from typing import Any, Optional


class MarginalsError(Exception):
    """Root of every error raised by the package."""

    exit_code: int = 2


# ============================================================================
# INVALID INPUT (exit 2)
# ============================================================================

class InvalidInputError(MarginalsError):
    exit_code = 2


class LengthMismatchError(InvalidInputError):
    pass


class NotNormalizedError(InvalidInputError):
    """Amplitudes do not have unit norm. Never silently renormalized."""

    def __init__(self, deviation: float):
        self.deviation = deviation
        super().__init__(f"state is not normalized (|norm^2 - 1| = {deviation:.3e})")


class IndexOutOfRangeError(InvalidInputError):
    pass


class InvalidDensityError(InvalidInputError):
    pass


class NotAPermutationError(InvalidInputError):
    pass


class NotUnitaryError(InvalidInputError):
    pass


class SingleQubitError(InvalidInputError):
    pass


class BadSubsetError(InvalidInputError):
    pass


class OutOfRangeError(InvalidInputError):
    pass


class WrongSizeError(InvalidInputError):
    pass


class QubitCapExceededError(InvalidInputError):
    pass


class MalformedFileError(InvalidInputError):
    pass


# ============================================================================
# INFEASIBLE (exit 1)
# ============================================================================

class InfeasibleError(MarginalsError):
    """The requested marginals cannot come from a pure state."""

    exit_code = 1

    def __init__(self, message: str, report: Optional[Any] = None):
        self.report = report
        super().__init__(message)


# ============================================================================
# INTERNAL FAULTS (exit 1)
# ============================================================================

class InternalInvariantError(MarginalsError):
    """A construction invariant failed. Signals a bug, never bad input."""

    exit_code = 1


class TheoremViolationError(MarginalsError):
    """A certificate inequality failed beyond tolerance."""

    exit_code = 1

    def __init__(self, message: str, report: Optional[Any] = None):
        self.report = report
        super().__init__(message)
