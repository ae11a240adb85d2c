"""Exceptions raised by fishersep.

Every error carries the process exit code the CLI returns for it.
"""

from typing import Any, Optional


class FisherSepError(Exception):
    """Base class for all expected failures."""

    exit_code = 1


class UsageError(FisherSepError):
    exit_code = 2


class SpecError(UsageError, ValueError):
    """Invalid synthetic dataset recipe."""


class DomainError(FisherSepError, ValueError):
    """Argument outside the mathematical domain of a function."""

    exit_code = 2


class ParseError(FisherSepError):
    exit_code = 3

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidInputError(FisherSepError, ValueError):
    exit_code = 3


class DegenerateDataError(FisherSepError):
    exit_code = 4


class DegeneratePointError(DegenerateDataError):
    """A single point cannot be projected (it sits at the centroid)."""

    def __init__(self, index: int, norm: float = 0.0):
        self.index = index
        self.norm = norm
        super().__init__(f"point {index} has norm {norm:.3g}; cannot project it onto the unit sphere")


class FullySeparableError(FisherSepError):
    """Every point is separable from every other one: no finite dimension estimate."""

    exit_code = 5


class ContractViolationError(FisherSepError, ValueError):
    pass


class NumericalError(FisherSepError):
    def __init__(self, message: str, diagnostics: Optional[dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        if self.diagnostics:
            details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
            message = f"{message} ({details})"
        super().__init__(message)
