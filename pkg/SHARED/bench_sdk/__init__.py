"""
Bench SDK - Statistical engine for seed-paired multi-task benchmark comparisons.

This package provides the pure-library side of the benchmark harness:
- Metric tensor, task/model specs and tensor I/O (JSON, CSV)
- Per-cell confidence intervals (Student-t, percentile bootstrap)
- Paired t and Wilcoxon signed-rank tests with Holm correction
- Friedman test, Nemenyi critical difference and cliques
- Report assembly, versioned report cache, LaTeX tables, SVG diagrams
- Configuration loading and structured logging

Version: 1.0.0
"""

__version__ = "1.0.0"

from .config_loader import load_registry_config, load_run_config, load_system_config
from .config_models import (
    BootstrapSpec,
    ExecutorSettings,
    RegistryConfig,
    ReportConfig,
    RunConfig,
    SyntheticModelProfile,
    SystemConfig,
)
from .latex import LatexOptions, to_latex
from .logger import JSONFormatter, JsonLogger, setup_logger
from .models import (
    Cell,
    MetricDirection,
    MetricTensor,
    ModelSpec,
    TaskSpec,
    TrialOutcome,
    TrialRequest,
    decode_tensor,
    encode_tensor,
    load_tensor_csv,
    load_tensor_json,
    save_tensor_json,
    seed_intersection,
    tensor_from_values,
    validate_tensor,
)
from .protocol import (
    BenchmarkError,
    CacheCorruptionError,
    CacheVersionError,
    ConfigError,
    DuplicateRegistrationError,
    EmptySelectionError,
    ErrorCode,
    InsufficientModelsError,
    InsufficientSamplesError,
    InvalidArgumentError,
    RegistryLockedError,
    TensorValidationError,
    TrialFailedError,
    TrialOutput,
    TrialSchemaError,
    TrialTimeoutError,
    UnknownModelError,
    UnknownTaskError,
)
from .ranking import CdResult, build_rank_table, cd_analysis, find_cliques, friedman, nemenyi_cd, rank_task
from .render import (
    CdDiagramStyle,
    compute_cd_layout,
    compute_pairwise_layout,
    render_cd_svg,
    render_cells_svg,
    render_pairwise_svg,
)
from .report import (
    BenchmarkReport,
    CellMark,
    build_report,
    mark_cells,
    pairwise_table,
    summary_table,
    with_config,
)
from .repositories import CalibrationRepository, ReportCacheRepository, cache_load, cache_save
from .stats import (
    CellSummary,
    PairwiseResult,
    bootstrap_halfwidth,
    cell_estimate,
    holm_adjust,
    paired_t,
    pairwise_task,
    wilcoxon_signed_rank,
)

__all__ = [
    "__version__",
    # Core model
    "MetricDirection",
    "TaskSpec",
    "ModelSpec",
    "Cell",
    "MetricTensor",
    "TrialRequest",
    "TrialOutcome",
    "validate_tensor",
    "seed_intersection",
    "encode_tensor",
    "decode_tensor",
    "load_tensor_json",
    "save_tensor_json",
    "load_tensor_csv",
    "tensor_from_values",
    # Stats
    "CellSummary",
    "PairwiseResult",
    "cell_estimate",
    "bootstrap_halfwidth",
    "paired_t",
    "wilcoxon_signed_rank",
    "holm_adjust",
    "pairwise_task",
    # Ranking
    "CdResult",
    "rank_task",
    "build_rank_table",
    "friedman",
    "nemenyi_cd",
    "find_cliques",
    "cd_analysis",
    # Report
    "BenchmarkReport",
    "CellMark",
    "build_report",
    "with_config",
    "mark_cells",
    "summary_table",
    "pairwise_table",
    "LatexOptions",
    "to_latex",
    "ReportCacheRepository",
    "CalibrationRepository",
    "cache_save",
    "cache_load",
    # Render
    "CdDiagramStyle",
    "compute_cd_layout",
    "render_cd_svg",
    "render_cells_svg",
    "render_pairwise_svg",
    "compute_pairwise_layout",
    # Configuration
    "ReportConfig",
    "BootstrapSpec",
    "SystemConfig",
    "RegistryConfig",
    "RunConfig",
    "ExecutorSettings",
    "SyntheticModelProfile",
    "load_system_config",
    "load_registry_config",
    "load_run_config",
    # Logging
    "JsonLogger",
    "setup_logger",
    "JSONFormatter",
    # Errors
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
    "TrialOutput",
    "CacheVersionError",
    "CacheCorruptionError",
    "ConfigError",
    "InsufficientModelsError",
]
