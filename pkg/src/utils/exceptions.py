"""Custom exception hierarchy for ArchetypeLab.

All application-specific exceptions inherit from ArchetypeLabError,
enabling broad ``except ArchetypeLabError`` handling when desired.
"""

from __future__ import annotations

from typing import Any


class ArchetypeLabError(Exception):
    """Base exception for all ArchetypeLab errors.

    Catch this to handle any application-defined error.
    """


class ValidationError(ArchetypeLabError):
    """Raised when user input fails validation (shapes, ranges, scenario fields, etc.)."""


class ShapeMismatchError(ValidationError):
    """Raised when an operand does not have the number of rows or entries expected."""


class BadProbabilitiesError(ValidationError):
    """Raised when a probability vector has non-positive entries or does not sum to 1."""


class SolverFailedError(ArchetypeLabError):
    """Raised when a linear program or factorization reports failure.

    Attributes:
        status: Solver status code, when the backend reports one.
    """

    def __init__(self, message: str, status: int | None = None) -> None:
        super().__init__(message)
        self.status = status


class RankDeficientError(ArchetypeLabError):
    """Raised when a matrix has numerical rank below its column count."""


class SingularDesignError(ArchetypeLabError):
    """Raised when sigma_min,p of the archetype matrix is numerically zero."""


class NoConvergenceError(ArchetypeLabError):
    """Raised when an iteration hits its cap before reaching tolerance.

    Attributes:
        residual: Residual at the returned iterate.
        partial: Best iterate found, usable as an approximation.
    """

    def __init__(self, message: str, residual: float, partial: Any = None) -> None:
        super().__init__(message)
        self.residual = residual
        self.partial = partial


class InfeasibleError(ArchetypeLabError):
    """Raised when a requested computation cannot be carried out at this size."""


class TooLargeError(ArchetypeLabError):
    """Raised when exact enumeration or an LP would exceed its configured cap."""


class EmptyCubeError(ArchetypeLabError):
    """Raised when a conditional cube contains no support point."""


class PreconditionFailedError(ArchetypeLabError):
    """Raised when a construction's stated precondition does not hold."""
