"""Project-specific exception hierarchy.

Defines semantic exceptions used across the toolkit to communicate
rejected input, unknown names, unit problems and numerical failures.
"""

from __future__ import annotations


class CollocationError(Exception):
    """Base error for the collocation toolkit."""


class ValidationError(CollocationError):
    """Raised when user input is invalid."""


class DimensionError(ValidationError):
    """Raised when an array does not have the shape a problem expects."""


class SchemeMismatchError(ValidationError):
    """Raised when a scheme's order cannot transcribe the problem's order."""


class OutOfMeshError(ValidationError):
    """Raised when a time lies outside the mesh span."""


class ConfigError(ValidationError):
    """Raised when an experiment configuration is malformed."""


class AccessDeniedError(CollocationError):
    """Raised when an operation tries to write outside the allowed scope."""


class NotFoundError(CollocationError):
    """Raised when a requested problem or method is not found."""


class UnsupportedProblemError(NotFoundError):
    """Raised for benchmark names that are known but not shipped."""


class UnitMismatchError(CollocationError):
    """Raised when a joint error mixes coordinates with different units."""


class DerivativeError(CollocationError):
    """Raised when finite differencing meets a non-finite value."""

    def __init__(self, message: str, *, index: int) -> None:
        super().__init__(message)
        self.index = index
