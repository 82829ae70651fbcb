"""Base package for shared harness abstractions."""

from .executor_base import TrialExecutor

__all__ = ["TrialExecutor"]
