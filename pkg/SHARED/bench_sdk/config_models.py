"""
Configuration data models using Pydantic for schema validation.

This module defines typed models for all configuration files:
- ReportConfig: Statistical report settings (alpha, CI method, pairwise method, bootstrap)
- SystemConfig: Global settings (report defaults, runner, cache, logging, render)
- RegistryConfig: Task/model catalog (SHARED/config/registry/*.json)
- RunConfig: One benchmark run (selector, models, seeds, executor settings)
- SyntheticModelProfile: Base metrics and noise for the synthetic trial executor
"""

import math
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .models import ModelSpec, TaskSpec

__all__ = [
    "DEFAULT_SEEDS",
    "DEFAULT_TRIAL_TIMEOUT_SEC",
    "COMMAND_PLACEHOLDERS",
    "ReportConfig",
    "BootstrapSpec",
    "RunnerConfig",
    "CacheConfig",
    "LoggingConfig",
    "RenderConfig",
    "SystemConfig",
    "RegistryConfig",
    "SyntheticModelParams",
    "SyntheticModelProfile",
    "ExecutorSettings",
    "RunConfig",
]

DEFAULT_SEEDS = list(range(10))
DEFAULT_TRIAL_TIMEOUT_SEC = 3600.0
COMMAND_PLACEHOLDERS = ("{task}", "{model}", "{seed}", "{epochs}")


# ============================================================================
# REPORT CONFIGURATION
# ============================================================================


class BootstrapSpec(BaseModel):
    """Percentile-bootstrap settings: B resamples drawn from a generator seeded by `seed`."""

    model_config = ConfigDict(frozen=True)

    B: int = Field(default=10000, ge=1, description="Number of bootstrap resamples")
    seed: int = Field(default=0, description="Seed of the resampling generator")


class ReportConfig(BaseModel):
    """
    Settings of the statistical report.

    Defaults: alpha 0.05, Student-t cell intervals, both pairwise tests, B = 10,000.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(default=0.05, gt=0.0, lt=1.0, description="Significance level")
    ci_method: Literal["t", "bootstrap"] = Field(
        default="t", description="Per-cell confidence interval method"
    )
    pairwise_method: Literal["t", "wilcoxon", "both"] = Field(
        default="both", description="Default pairwise test for tables and exports"
    )
    bootstrap_B: int = Field(default=10000, ge=1, description="Bootstrap resamples")
    bootstrap_seed: int = Field(default=0, description="Bootstrap generator seed")

    def bootstrap_spec(self) -> BootstrapSpec:
        return BootstrapSpec(B=self.bootstrap_B, seed=self.bootstrap_seed)


# ============================================================================
# SYSTEM CONFIGURATION
# ============================================================================


class RunnerConfig(BaseModel):
    parallelism: int = Field(default=1, ge=1, le=256, description="Concurrent trials")
    trial_timeout_sec: float = Field(
        default=DEFAULT_TRIAL_TIMEOUT_SEC, gt=0, description="External trial timeout (1 h)"
    )
    default_seeds: List[int] = Field(default_factory=lambda: list(DEFAULT_SEEDS))
    registry_path: str = Field(default="SHARED/config/registry/benchmark_registry.json")


class CacheConfig(BaseModel):
    cache_dir: str = Field(default="SHARED/data/cache", description="Default report cache directory")
    report_filename: str = Field(default="report.json")


class LoggingConfig(BaseModel):
    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    log_root: str = Field(default="SHARED/logs")
    max_file_size_mb: int = Field(default=100, ge=1)
    backup_count: int = Field(default=5, ge=0)


class RenderConfig(BaseModel):
    """CD diagram defaults: 10 pixels per rank unit times scale_multiplier."""

    scale_multiplier: float = Field(default=8.0, gt=0)
    precision: int = Field(default=2, ge=0, le=6)


class SystemConfig(BaseModel):
    """
    Global settings loaded from SHARED/config/system.json.

    Environment overrides are applied by config_loader before validation.
    """

    schema_version: str = Field(default="1.0.0")
    system_id: str = Field(default="bench_engine")
    report: ReportConfig = Field(default_factory=ReportConfig)
    runner: RunnerConfig = Field(default_factory=RunnerConfig)
    cache: CacheConfig = Field(default_factory=CacheConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    render: RenderConfig = Field(default_factory=RenderConfig)

    class Config:
        extra = "allow"


# ============================================================================
# REGISTRY CATALOG
# ============================================================================


class RegistryConfig(BaseModel):
    """
    Task/model catalog: category -> list of TaskSpec, plus model specs.

    Each task's `category` may be omitted in the file; it is filled from its key.
    """

    schema_version: str = Field(default="1.0.0")
    registry_id: str = Field(default="registry")
    categories: Dict[str, List[TaskSpec]] = Field(default_factory=dict)
    models: List[ModelSpec] = Field(default_factory=list)

    @model_validator(mode="before")
    @classmethod
    def fill_categories(cls, data):
        if isinstance(data, dict) and isinstance(data.get("categories"), dict):
            filled = {}
            for category, tasks in data["categories"].items():
                filled[category] = [
                    {**t, "category": t.get("category", category)} if isinstance(t, dict) else t
                    for t in tasks
                ]
            data = {**data, "categories": filled}
        return data


# ============================================================================
# SYNTHETIC PROFILE
# ============================================================================


class SyntheticModelParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    base_metric: float = Field(..., description="Base metric shared by all tasks")
    noise_sd: float = Field(default=0.0, ge=0.0, description="Seed-level noise standard deviation")
    task_offsets: Dict[str, float] = Field(
        default_factory=dict, description="Per-task additive offsets to base_metric"
    )

    @field_validator("base_metric")
    @classmethod
    def validate_base(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("base_metric must be finite")
        return v


class SyntheticModelProfile(BaseModel):
    """
    Per-model base metrics and noise for deterministic synthetic trials.

    noise selects the standardized noise shape: gaussian, or lognormal (right-skewed,
    zero mean, unit variance) for exercising the percentile bootstrap.
    data_noise_sd is the sd of the extra data-resampling perturbation added on
    seed-aware tasks; when unset the model's own noise_sd is used.
    """

    model_config = ConfigDict(frozen=True)

    models: Dict[str, SyntheticModelParams] = Field(default_factory=dict)
    noise: Literal["gaussian", "lognormal"] = "gaussian"
    data_noise_sd: Optional[float] = Field(default=None, ge=0.0)

    def base(self, task: str, model: str) -> float:
        params = self.models[model]
        return params.base_metric + params.task_offsets.get(task, 0.0)


# ============================================================================
# RUN CONFIGURATION
# ============================================================================


class ExecutorSettings(BaseModel):
    """Trial executor selection: in-process synthetic or external command."""

    kind: Literal["synthetic", "external"] = "synthetic"
    command: Optional[str] = Field(
        default=None, description="Command template with {task} {model} {seed} {epochs}"
    )
    timeout_sec: Optional[float] = Field(default=None, gt=0)
    parallelism: Optional[int] = Field(default=None, ge=1, le=256)
    profile: Optional[SyntheticModelProfile] = None

    @model_validator(mode="after")
    def validate_kind(self) -> "ExecutorSettings":
        if self.kind == "external":
            if not self.command:
                raise ValueError("external executor requires a command template")
            missing = [p for p in COMMAND_PLACEHOLDERS if p not in self.command]
            if missing:
                raise ValueError(f"command template is missing placeholders: {missing}")
        return self


class RunConfig(BaseModel):
    """
    One benchmark run.

    Task selection: `category` or an explicit `tasks` list from the registry, optionally
    filtered by `task_type`, plus ad-hoc `custom_tasks` that never touch the registry.
    Models: registry names in `models` (empty means every registered model) plus
    ad-hoc `custom_models`.
    """

    model_config = ConfigDict(extra="forbid")

    run_id: str = Field(default="run", min_length=1)
    category: Optional[str] = None
    tasks: Optional[List[str]] = None
    task_type: Optional[str] = None
    custom_tasks: List[TaskSpec] = Field(default_factory=list)
    models: List[str] = Field(default_factory=list)
    custom_models: List[ModelSpec] = Field(default_factory=list)
    seeds: List[int] = Field(default_factory=lambda: list(DEFAULT_SEEDS))
    epochs: Dict[str, int] = Field(default_factory=dict, description="Per-task epoch overrides")
    alpha: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    report: ReportConfig = Field(default_factory=ReportConfig)
    executor: ExecutorSettings = Field(default_factory=ExecutorSettings)
    cache_path: Optional[str] = None

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("seeds must be non-empty")
        if len(set(v)) != len(v):
            raise ValueError(f"seeds must be distinct: {v}")
        return v

    @field_validator("epochs")
    @classmethod
    def validate_epochs(cls, v: Dict[str, int]) -> Dict[str, int]:
        bad = {k: e for k, e in v.items() if e < 1}
        if bad:
            raise ValueError(f"epoch overrides must be >= 1: {bad}")
        return v

    @model_validator(mode="after")
    def validate_selector(self) -> "RunConfig":
        if self.category is not None and self.tasks is not None:
            raise ValueError("use either category or tasks, not both")
        return self

    def report_config(self) -> ReportConfig:
        """Report settings with the run-level alpha applied."""
        if self.alpha is None:
            return self.report
        return self.report.model_copy(update={"alpha": self.alpha})
