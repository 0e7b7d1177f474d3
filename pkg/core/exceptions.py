#!/usr/bin/env python3
"""
Exception Hierarchy for Bohmian Quantization
Typed errors with context, recovery hints and CLI exit codes.
"""

from typing import Optional, Dict, Any
from enum import Enum


class ErrorCategory(Enum):
    """Error categories for classification and reporting."""
    VALIDATION = "validation"
    DOMAIN = "domain"
    DEGENERATE = "degenerate"
    CONSISTENCY = "consistency"
    CONVERGENCE = "convergence"
    INTEGRATION = "integration"
    CONFIGURATION = "configuration"
    DIAGNOSTIC = "diagnostic"
    INTERNAL = "internal"


class ErrorSeverity(Enum):
    """Error severity levels."""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class QuantizationError(Exception):
    """
    Base exception for all library errors.

    Attributes:
        message: Human-readable error message
        category: Error category for classification
        severity: Error severity level
        context: Additional context about the error
        recovery_hint: Suggestion for error recovery
        original_error: Original exception if wrapped
        exit_code: Process exit code used by the CLI
    """

    exit_code: int = 2

    def __init__(
        self,
        message: str,
        category: ErrorCategory = ErrorCategory.INTERNAL,
        severity: ErrorSeverity = ErrorSeverity.MEDIUM,
        context: Optional[Dict[str, Any]] = None,
        recovery_hint: Optional[str] = None,
        original_error: Optional[Exception] = None
    ):
        super().__init__(message)
        self.message = message
        self.category = category
        self.severity = severity
        self.context = context or {}
        self.recovery_hint = recovery_hint
        self.original_error = original_error

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for logging/serialization."""
        return {
            "error_type": self.__class__.__name__,
            "message": self.message,
            "category": self.category.value,
            "severity": self.severity.value,
            "context": self.context,
            "recovery_hint": self.recovery_hint,
            "original_error": str(self.original_error) if self.original_error else None
        }


# Input validation errors
class ValidationError(QuantizationError):
    """Input validation failed."""

    exit_code = 1

    def __init__(self, message: str, field: Optional[str] = None, **kwargs):
        kwargs.setdefault("category", ErrorCategory.VALIDATION)
        kwargs.setdefault("severity", ErrorSeverity.LOW)
        kwargs["context"] = kwargs.get("context", {})
        if field:
            kwargs["context"]["field"] = field
        super().__init__(message, **kwargs)


class InvalidParameterError(ValidationError):
    """Invalid parameter value."""

    def __init__(self, parameter: str, value: Any, expected: str):
        super().__init__(
            f"Invalid value for parameter '{parameter}': {value}. Expected: {expected}",
            field=parameter,
            context={"parameter": parameter, "value": value, "expected": expected},
            recovery_hint=f"Ensure {parameter} matches: {expected}"
        )


class GridSizeError(ValidationError):
    """Grid has too few samples for the requested stencil."""

    def __init__(self, n_points: int, required: int = 3):
        super().__init__(
            f"Grid has {n_points} points; at least {required} are required",
            field="n_points",
            context={"n_points": n_points, "required": required},
            recovery_hint=f"Use a grid with n_points >= {required}"
        )


class DomainError(ValidationError):
    """Grid or query point lies outside the domain of a field."""

    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("category", ErrorCategory.DOMAIN)
        kwargs.setdefault("recovery_hint", "Restrict the grid to the domain of the potential")
        super().__init__(message, **kwargs)


class DegenerateInputError(ValidationError):
    """Input carries no information (identically zero field, all samples masked)."""

    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("category", ErrorCategory.DEGENERATE)
        kwargs.setdefault("severity", ErrorSeverity.MEDIUM)
        super().__init__(message, **kwargs)


class ConsistencyError(ValidationError):
    """Inputs that must agree do not (quantum numbers, constants, grids)."""

    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("category", ErrorCategory.CONSISTENCY)
        kwargs.setdefault("severity", ErrorSeverity.MEDIUM)
        super().__init__(message, **kwargs)


# Configuration errors
class ConfigurationError(QuantizationError):
    """Configuration-related errors."""

    exit_code = 1

    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("category", ErrorCategory.CONFIGURATION)
        kwargs.setdefault("severity", ErrorSeverity.CRITICAL)
        super().__init__(message, **kwargs)


class ConfigFileError(ConfigurationError):
    """Malformed run configuration file."""

    def __init__(self, path: str, line: Optional[int], reason: str):
        where = f"{path}:{line}" if line is not None else path
        super().__init__(
            f"{where}: {reason}",
            context={"path": path, "line": line, "reason": reason},
            recovery_hint="See docs/CONFIG_SCHEMA.md for the accepted keys"
        )
        self.line = line


# Solver errors
class ConvergenceError(QuantizationError):
    """Root search or bisection did not converge."""

    exit_code = 2

    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("category", ErrorCategory.CONVERGENCE)
        kwargs.setdefault("severity", ErrorSeverity.HIGH)
        kwargs.setdefault("recovery_hint", "Widen the energy bracket or refine the grid")
        super().__init__(message, **kwargs)


class MaskedSampleError(QuantizationError):
    """Quantum potential requested inside a node-exclusion window of an arbitrary field."""

    exit_code = 2

    def __init__(self, position: Any):
        super().__init__(
            f"Quantum potential is undefined at {position}: inside a node-exclusion window",
            category=ErrorCategory.INTEGRATION,
            context={"position": position},
            recovery_hint="Start away from nodes, or use a solver eigenstate which carries Q = E - V"
        )


class NoClassicalOrbitError(QuantizationError):
    """Energy lies below the minimum of the effective potential."""

    exit_code = 2

    def __init__(self, energy: float, minimum: float):
        super().__init__(
            f"No classical orbit: E={energy} is below the effective-potential minimum {minimum}",
            category=ErrorCategory.INTEGRATION,
            context={"energy": energy, "minimum": minimum},
            recovery_hint="Raise E or lower the angular momentum"
        )


class DiagnosticFailure(QuantizationError):
    """One or more verification checks failed."""

    exit_code = 3

    def __init__(self, failed_checks: list):
        super().__init__(
            f"{len(failed_checks)} diagnostic check(s) failed: {', '.join(failed_checks)}",
            category=ErrorCategory.DIAGNOSTIC,
            severity=ErrorSeverity.HIGH,
            context={"failed_checks": list(failed_checks)}
        )
