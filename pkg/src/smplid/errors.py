"""Exception types shared across the package."""


class SmplidError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SmplidError):
    """An argument violates a documented precondition (non-finite, wrong shape, ...)."""


class SequenceTooShortError(InvalidInputError):
    """A time series has too few frames for the requested operation."""


class ConfigurationError(SmplidError):
    """A configuration table or file is inconsistent (e.g. mass fractions off)."""


class ParseError(SmplidError):
    """A data file does not conform to its schema."""


class ComputationError(SmplidError):
    """A numerical procedure failed (divergence, non-finite intermediate)."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration
