"""
Error taxonomy and the external-trial wire schema.

This module defines:
- ErrorCode: string constants attached to every engine exception
- BenchmarkError and its subclasses (one per failure family)
- TrialOutput: the JSON object an external trial prints on stdout

Exit-code mapping for the CLI lives next to the codes (see ErrorCode.exit_code).
"""

import math
from typing import Any, Dict, Iterable, List, Optional

from pydantic import BaseModel, ConfigDict, Field, StrictFloat, field_validator

__all__ = [
    "ErrorCode",
    "BenchmarkError",
    "InsufficientSamplesError",
    "InvalidArgumentError",
    "TensorValidationError",
    "UnknownTaskError",
    "UnknownModelError",
    "DuplicateRegistrationError",
    "RegistryLockedError",
    "EmptySelectionError",
    "TrialFailedError",
    "TrialTimeoutError",
    "TrialSchemaError",
    "CacheVersionError",
    "CacheCorruptionError",
    "ConfigError",
    "InsufficientModelsError",
    "TrialOutput",
    "check_finite_series",
]


class ErrorCode:
    """Error codes carried by BenchmarkError.error_code."""

    INSUFFICIENT_SAMPLES = "B001"
    INVALID_ARGUMENT = "B002"
    INVALID_TENSOR = "B003"
    UNKNOWN_NAME = "B004"
    DUPLICATE_REGISTRATION = "B005"
    REGISTRY_LOCKED = "B006"
    EMPTY_SELECTION = "B007"
    TRIAL_FAILED = "B008"
    TRIAL_TIMEOUT = "B009"
    TRIAL_SCHEMA_VIOLATION = "B010"
    CACHE_VERSION_MISMATCH = "B011"
    CACHE_CORRUPTED = "B012"
    CONFIG_INVALID = "B013"
    INSUFFICIENT_MODELS = "B014"
    INTERNAL_ERROR = "B015"

    EXIT_OK = 0
    EXIT_USAGE = 1
    EXIT_DATA = 2
    EXIT_TRIAL = 3

    @classmethod
    def is_trial_failure(cls, error_code: str) -> bool:
        """Check if error code belongs to the trial-execution family."""
        return error_code in {cls.TRIAL_FAILED, cls.TRIAL_TIMEOUT, cls.TRIAL_SCHEMA_VIOLATION}

    @classmethod
    def exit_code(cls, error_code: str) -> int:
        """Map an error code to the CLI exit code (3 for trial failures, 2 otherwise)."""
        if cls.is_trial_failure(error_code):
            return cls.EXIT_TRIAL
        return cls.EXIT_DATA


# ============================================================================
# EXCEPTION CLASSES
# ============================================================================


class BenchmarkError(Exception):
    """Base class for all engine errors."""

    default_code = ErrorCode.INTERNAL_ERROR

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        """Initialize an engine error.

        Args:
            message: Human-readable error message.
            error_code: Error code (defaults to the class code).
            details: Structured context for logs and --json output.
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.default_code
        self.details: Dict[str, Any] = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        """Return the error as a JSON-ready dictionary."""
        return {"error_code": self.error_code, "message": self.message, "details": self.details}


class InsufficientSamplesError(BenchmarkError):
    """Raised when an estimator needs more seeds than were given."""

    default_code = ErrorCode.INSUFFICIENT_SAMPLES


class InvalidArgumentError(BenchmarkError, ValueError):
    """Raised on out-of-range or mismatched arguments."""

    default_code = ErrorCode.INVALID_ARGUMENT


class TensorValidationError(BenchmarkError):
    """Raised when a metric tensor violates its invariants."""

    default_code = ErrorCode.INVALID_TENSOR

    def __init__(self, message: str, violations: Iterable[str] = ()):
        self.violations: List[str] = list(violations)
        super().__init__(message, details={"violations": self.violations})


class UnknownTaskError(BenchmarkError, LookupError):
    """Raised when a task name is not known."""

    default_code = ErrorCode.UNKNOWN_NAME


class UnknownModelError(BenchmarkError, LookupError):
    """Raised when a model name is not known."""

    default_code = ErrorCode.UNKNOWN_NAME


class DuplicateRegistrationError(BenchmarkError):
    default_code = ErrorCode.DUPLICATE_REGISTRATION


class RegistryLockedError(BenchmarkError):
    default_code = ErrorCode.REGISTRY_LOCKED


class EmptySelectionError(BenchmarkError):
    """Raised when a selector resolves to nothing to benchmark."""

    default_code = ErrorCode.EMPTY_SELECTION


class TrialFailedError(BenchmarkError):
    """Raised when a scheduled (task, model, seed) trial cannot produce a metric."""

    default_code = ErrorCode.TRIAL_FAILED

    def __init__(
        self,
        message: str,
        task: Optional[str] = None,
        model: Optional[str] = None,
        seed: Optional[int] = None,
        stderr: str = "",
        error_code: Optional[str] = None,
    ):
        self.task = task
        self.model = model
        self.seed = seed
        self.stderr = stderr
        super().__init__(
            message,
            error_code=error_code,
            details={"task": task, "model": model, "seed": seed, "stderr": stderr},
        )

    def with_identity(self, task: str, model: str, seed: int) -> "TrialFailedError":
        """Fill in the failing trial identity when the raiser did not know it."""
        self.task = self.task or task
        self.model = self.model or model
        self.seed = seed if self.seed is None else self.seed
        self.details.update({"task": self.task, "model": self.model, "seed": self.seed})
        return self

    def __str__(self) -> str:
        if self.task is None:
            return self.message
        return f"{self.message} (task={self.task}, model={self.model}, seed={self.seed})"


class TrialTimeoutError(TrialFailedError):
    default_code = ErrorCode.TRIAL_TIMEOUT


class TrialSchemaError(TrialFailedError):
    """Raised when an external trial prints something other than the agreed JSON object."""

    default_code = ErrorCode.TRIAL_SCHEMA_VIOLATION


class CacheVersionError(BenchmarkError):
    default_code = ErrorCode.CACHE_VERSION_MISMATCH


class CacheCorruptionError(BenchmarkError):
    default_code = ErrorCode.CACHE_CORRUPTED


class ConfigError(BenchmarkError):
    default_code = ErrorCode.CONFIG_INVALID


class InsufficientModelsError(BenchmarkError):
    """Raised when fewer than two models are available for a comparison."""

    default_code = ErrorCode.INSUFFICIENT_MODELS


# ============================================================================
# EXTERNAL TRIAL STDOUT PROTOCOL
# ============================================================================


class TrialOutput(BaseModel):
    """
    One JSON object printed by an external trial command.

    Example:
        {"final_metric": 0.811, "per_epoch": [0.52, 0.71, 0.80, 0.811]}
    """

    model_config = ConfigDict(extra="allow")

    # Strict: "0.5" or true on stdout is a protocol violation, not a metric. Ints still pass.
    final_metric: StrictFloat = Field(..., description="Final held-out metric of the trial")
    per_epoch: Optional[List[StrictFloat]] = Field(
        default=None, description="Optional per-epoch metric series (stored, never analyzed)"
    )

    @field_validator("final_metric")
    @classmethod
    def validate_final_metric(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("final_metric must be finite")
        return v

    @field_validator("per_epoch")
    @classmethod
    def validate_per_epoch(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None:
            check_finite_series(v)
        return v


def check_finite_series(values: Iterable[float]) -> None:
    """Raise ValueError naming the first non-finite entry of a per-epoch series."""
    for i, value in enumerate(values):
        if not math.isfinite(value):
            raise ValueError(f"per_epoch[{i}] must be finite, got {value!r}")
