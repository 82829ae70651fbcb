"""
Trial executor interface shared by the synthetic and external-command executors.

Responsibilities of an executor:
- Materialize task data (load_data), receiving the benchmark seed only for seed-aware tasks
- Turn one TrialRequest into a TrialOutcome (execute)

The runner owns scheduling, reseeding and merging; executors never see other trials.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Any, Optional

from bench_sdk.models import TaskSpec, TrialOutcome, TrialRequest

if TYPE_CHECKING:
    from harness.runner.seeding import GeneratorBundle


class TrialExecutor(ABC):
    """Pluggable trial executor."""

    name: str = "executor"

    def load_data(self, task: TaskSpec, seed: Optional[int]) -> Any:
        """
        Materialize the data of a task.

        Called once per task with seed=None for non-seed-aware tasks (the result is reused
        across seeds) and once per (task, seed) for seed-aware tasks.
        """
        return None

    @abstractmethod
    async def execute(self, request: TrialRequest, data: Any, streams: "GeneratorBundle") -> TrialOutcome:
        """Run one trial and return its final metric."""
