"""
Unit tests for the error taxonomy and the external trial output schema.
"""

import pytest
from pydantic import ValidationError

from bench_sdk.protocol import (
    BenchmarkError,
    CacheCorruptionError,
    ErrorCode,
    InvalidArgumentError,
    TensorValidationError,
    TrialFailedError,
    TrialOutput,
    TrialSchemaError,
    TrialTimeoutError,
    UnknownTaskError,
)


@pytest.mark.unit
class TestErrorCodes:
    """Test code-to-exit mapping."""

    @pytest.mark.parametrize("code", ["B008", "B009", "B010"])
    def test_trial_failures_exit_three(self, code):
        """Test the trial family maps to exit 3."""
        assert ErrorCode.exit_code(code) == ErrorCode.EXIT_TRIAL == 3

    @pytest.mark.parametrize("code", ["B001", "B003", "B011", "B012", "B013"])
    def test_data_errors_exit_two(self, code):
        """Test other codes map to exit 2."""
        assert ErrorCode.exit_code(code) == 2

    def test_default_codes(self):
        """Test each class carries its own code."""
        assert InvalidArgumentError("x").error_code == "B002"
        assert UnknownTaskError("x").error_code == "B004"
        assert TrialTimeoutError("x").error_code == "B009"
        assert TrialSchemaError("x").error_code == "B010"
        assert CacheCorruptionError("x").error_code == "B012"
        assert BenchmarkError("x").error_code == ErrorCode.INTERNAL_ERROR

    def test_builtin_bases(self):
        """Test argument and lookup errors keep their builtin bases."""
        assert isinstance(InvalidArgumentError("x"), ValueError)
        assert isinstance(UnknownTaskError("x"), LookupError)


@pytest.mark.unit
class TestExceptions:
    """Test exception payloads."""

    def test_to_dict(self):
        """Test the JSON-ready form."""
        err = InvalidArgumentError("bad alpha", details={"alpha": 2})
        assert err.to_dict() == {"error_code": "B002", "message": "bad alpha", "details": {"alpha": 2}}

    def test_tensor_violations(self):
        """Test violations are kept on the exception and in details."""
        err = TensorValidationError("invalid", ["ragged seeds"])
        assert err.violations == ["ragged seeds"]
        assert err.details["violations"] == ["ragged seeds"]

    def test_trial_identity_is_filled_once(self):
        """Test with_identity keeps identities the raiser already knew."""
        err = TrialFailedError("exit 1", model="GAT").with_identity("Cora", "GCN", 4)
        assert (err.task, err.model, err.seed) == ("Cora", "GAT", 4)
        assert str(err) == "exit 1 (task=Cora, model=GAT, seed=4)"
        assert err.details["seed"] == 4

    def test_seed_zero_is_kept(self):
        """Test a known seed 0 is not replaced."""
        err = TrialFailedError("x", seed=0).with_identity("t", "m", 7)
        assert err.seed == 0


@pytest.mark.unit
class TestTrialOutput:
    """Test the external trial stdout schema."""

    def test_minimal(self):
        """Test only final_metric is required."""
        out = TrialOutput.model_validate({"final_metric": 0.811})
        assert out.per_epoch is None

    def test_extra_keys_allowed(self):
        """Test unknown keys are accepted."""
        out = TrialOutput.model_validate({"final_metric": 0.5, "per_epoch": [0.1, 0.5], "gpu": "a100"})
        assert out.per_epoch == [0.1, 0.5]

    @pytest.mark.parametrize("payload", [{}, {"final_metric": "nan"}, {"final_metric": "high"}])
    def test_rejected(self, payload):
        """Test missing, non-finite and non-numeric metrics."""
        with pytest.raises(ValidationError):
            TrialOutput.model_validate(payload)
