"""Custom exceptions for the Best-k-Arm simulator."""

from typing import Any, Dict, Optional


class BestKError(Exception):
    """Base exception for the Best-k-Arm simulator."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    @property
    def field(self) -> Optional[str]:
        """Name of the offending field, when known."""
        value = self.details.get("field")
        return str(value) if value is not None else None


class BestKValidationError(BestKError, ValueError):
    """Raised when user-supplied data fails validation."""
    pass


class InstanceValidationError(BestKValidationError):
    """Raised when an instance violates the Best-k-Arm model."""
    pass


class ParameterError(BestKValidationError):
    """Raised when an operation receives out-of-range arguments."""
    pass


class DomainError(ParameterError):
    """Raised when a function is evaluated outside its domain."""
    pass


class ConfigurationError(BestKValidationError):
    """Raised when configuration is invalid."""
    pass


class HarnessIOError(BestKError, OSError):
    """Raised when instance or result files cannot be read or written."""
    pass


class BudgetExhausted(BestKError):
    """Raised by a ledger whose hard sample budget would be exceeded."""

    def __init__(self, budget: int, requested: int, total: int):
        super().__init__(
            f"Sample budget of {budget} exhausted ({total} used, {requested} requested)",
            details={"budget": budget, "requested": requested, "total": total},
        )
        self.budget = budget


# Stable CLI exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code reported for it."""
    if isinstance(error, BestKValidationError):
        return EXIT_VALIDATION
    if isinstance(error, (HarnessIOError, OSError)):
        return EXIT_IO
    return EXIT_FAILURE
