"""
Deterministic synthetic trial executor.

final_metric = base(task, model) + noise_sd * z, with z drawn from the trial-noise stream.
On seed-aware tasks a data-resampling perturbation drawn from the data stream is added, so
the data stream is consumed iff the task's seed_aware_data flag is set.

The noise shape is gaussian by default; lognormal gives a right-skewed standardized
draw (zero mean, unit variance) for exercising the percentile bootstrap.
"""

import math
from typing import Any, Dict, Optional

import numpy as np

from bench_sdk.config_models import SyntheticModelProfile
from bench_sdk.models import TaskSpec, TrialOutcome, TrialRequest
from bench_sdk.protocol import UnknownModelError
from harness.base.executor_base import TrialExecutor
from harness.runner.seeding import GeneratorBundle

__all__ = ["LOGNORMAL_SIGMA", "standard_draw", "synthetic_trial", "SyntheticExecutor"]

LOGNORMAL_SIGMA = 0.5


def standard_draw(rng: np.random.Generator, noise: str = "gaussian") -> float:
    """One zero-mean, unit-variance draw of the given shape."""
    z = float(rng.standard_normal())
    if noise == "lognormal":
        s2 = LOGNORMAL_SIGMA**2
        mean = math.exp(s2 / 2.0)
        sd = math.sqrt((math.exp(s2) - 1.0) * math.exp(s2))
        return (math.exp(LOGNORMAL_SIGMA * z) - mean) / sd
    return z


def synthetic_trial(
    profile: SyntheticModelProfile, request: TrialRequest, streams: GeneratorBundle
) -> TrialOutcome:
    """
    Produce one synthetic final metric.

    Raises:
        UnknownModelError: If the model has no entry in the profile
    """
    model = request.model.name
    if model not in profile.models:
        raise UnknownModelError(
            f"Model {model} has no synthetic profile entry", details={"model": model}
        )
    params = profile.models[model]
    value = profile.base(request.task.name, model)
    value += params.noise_sd * standard_draw(streams.trial_noise, profile.noise)
    if request.task.seed_aware_data:
        data_sd = params.noise_sd if profile.data_noise_sd is None else profile.data_noise_sd
        value += data_sd * standard_draw(streams.data, profile.noise)
    return TrialOutcome(final_metric=value)


class SyntheticExecutor(TrialExecutor):
    """
    In-process executor over a SyntheticModelProfile.

    Counts execute() and load_data() calls so callers can prove that cached reports are
    regenerated without running trials.
    """

    name = "synthetic"

    def __init__(self, profile: SyntheticModelProfile):
        self.profile = profile
        self.calls = 0
        self.data_loads: Dict[str, int] = {}

    def load_data(self, task: TaskSpec, seed: Optional[int]) -> Any:
        self.data_loads[task.name] = self.data_loads.get(task.name, 0) + 1
        return {"task": task.name, "seed": seed}

    async def execute(self, request: TrialRequest, data: Any, streams: GeneratorBundle) -> TrialOutcome:
        self.calls += 1
        return synthetic_trial(self.profile, request, streams)
