"""
Structured statistical report R = (X, cell means, half-widths, adjusted p, mean ranks, CD).

build_report() is a pure function of (tensor, config): cells, per-task pairwise families
and the CD analysis are derived from the tensor alone, so a cached report regenerates
every table and figure without re-running trials.
"""

import math
from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from . import __version__ as ENGINE_VERSION
from .config_models import ReportConfig
from .models import MetricDirection, MetricTensor, encode_tensor, seed_intersection, validate_tensor
from .protocol import InvalidArgumentError, UnknownTaskError
from .ranking import NEMENYI_K_MAX, NEMENYI_Q, CdResult, cd_analysis
from .stats import CellSummary, PairwiseResult, bootstrap_halfwidth, cell_estimate, pairwise_task
from .utils import canonical_json, format_cell, sha256_hex

__all__ = [
    "PairwiseMethod",
    "CellMark",
    "Provenance",
    "TaskPairwise",
    "BenchmarkReport",
    "RowMarks",
    "SummaryRow",
    "PairwiseRow",
    "build_report",
    "with_config",
    "mark_cells",
    "summary_table",
    "pairwise_table",
]

PairwiseMethod = Literal["t", "wilcoxon", "both"]


class CellMark(str, Enum):
    WINNER = "winner"
    TIE = "tie"
    PLAIN = "plain"
    INCOMPATIBLE = "incompatible"


class Provenance(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    engine_version: str
    tensor_hash: str
    config_hash: str
    run_config_hash: Optional[str] = None


class TaskPairwise(BaseModel):
    """Pairwise family of one task: C(k_t, 2) results in registry pair order."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    task: str
    results: Tuple[PairwiseResult, ...]


class BenchmarkReport(BaseModel):
    """
    Immutable report assembled by build_report().

    cd is None when fewer than 2 models are present on every task, fewer than 2 tasks
    exist, the universal model count exceeds the tabulated Nemenyi range, or alpha has
    no tabulated Nemenyi critical value.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    tensor: MetricTensor
    config: ReportConfig
    cells: Tuple[CellSummary, ...]
    pairwise: Tuple[TaskPairwise, ...]
    cd: Optional[CdResult] = None
    provenance: Provenance

    def cell(self, task: str, model: str) -> Optional[CellSummary]:
        for cell in self.cells:
            if cell.task == task and cell.model == model:
                return cell
        return None

    def task_pairwise(self, task: str) -> Tuple[PairwiseResult, ...]:
        for family in self.pairwise:
            if family.task == task:
                return family.results
        raise UnknownTaskError(f"Unknown task: {task}", details={"task": task})


class RowMarks(BaseModel):
    """
    Cell marks of one task row.

    tie_broken is True when the winner shares its exact mean with another model and was
    chosen by registry order.
    """

    model_config = ConfigDict(frozen=True)

    task: str
    winner: Optional[str]
    marks: Dict[str, CellMark]
    tie_broken: bool = False

    def __getitem__(self, model: str) -> CellMark:
        return self.marks[model]

    def models_marked(self, mark: CellMark) -> List[str]:
        return [m for m, v in self.marks.items() if v is mark]


class SummaryRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    task: str
    category: str
    model: str
    mean: Optional[float]
    halfwidth: Optional[float]
    mark: CellMark
    direction: MetricDirection
    text: str = Field(..., description="mean±h at 3 decimals, or n/a")


class PairwiseRow(BaseModel):
    model_config = ConfigDict(frozen=True, protected_namespaces=())

    task: str
    model_a: str
    model_b: str
    delta_mu: float
    p_holm_t: float
    p_holm_w: float
    agree: bool
    significant: bool

    @property
    def pair(self) -> str:
        return f"{self.model_a} vs {self.model_b}"


# ============================================================================
# ASSEMBLY
# ============================================================================


def _summarize_cell(tensor: MetricTensor, task: str, model: str, config: ReportConfig) -> CellSummary:
    values = tensor.pair_values(task, model)
    if config.ci_method == "bootstrap":
        mean = float(values.mean())
        halfwidth = bootstrap_halfwidth(values, config.alpha, config.bootstrap_spec())
    else:
        mean, _, halfwidth = cell_estimate(values, config.alpha)
    return CellSummary(
        task=task,
        model=model,
        mean=mean,
        halfwidth=halfwidth,
        n_seeds=int(values.size),
        ci_method=config.ci_method,
        alpha=config.alpha,
    )


def _cd_or_none(tensor: MetricTensor, alpha: float) -> Optional[CdResult]:
    universal = [m for m in tensor.models if all(tensor.has_pair(t, m) for t in tensor.task_names)]
    if len(tensor.tasks) < 2 or not 2 <= len(universal) <= NEMENYI_K_MAX:
        return None
    if not any(math.isclose(a, alpha) for a in NEMENYI_Q):
        return None
    return cd_analysis(tensor, alpha)


def build_report(
    tensor: MetricTensor, config: ReportConfig, run_config_hash: Optional[str] = None
) -> BenchmarkReport:
    """
    Assemble the report from a validated tensor.

    Raises:
        TensorValidationError: If the tensor violates its invariants
        InsufficientSamplesError: If the t method meets a single-seed tensor
    """
    validate_tensor(tensor).raise_if_invalid()

    cells: List[CellSummary] = []
    families: List[TaskPairwise] = []
    for task in tensor.task_names:
        present = seed_intersection(tensor, task)
        cells.extend(_summarize_cell(tensor, task, m, config) for m in present)
        results = pairwise_task(tensor, task, config) if len(present) >= 2 else []
        families.append(TaskPairwise(task=task, results=tuple(results)))

    provenance = Provenance(
        engine_version=ENGINE_VERSION,
        tensor_hash=sha256_hex(canonical_json(encode_tensor(tensor))),
        config_hash=sha256_hex(canonical_json(config.model_dump(mode="json"))),
        run_config_hash=run_config_hash,
    )
    return BenchmarkReport(
        tensor=tensor,
        config=config,
        cells=tuple(cells),
        pairwise=tuple(families),
        cd=_cd_or_none(tensor, config.alpha),
        provenance=provenance,
    )


def with_config(report: BenchmarkReport, **changes) -> BenchmarkReport:
    """Rebuild a report from its own tensor under changed ReportConfig fields."""
    config = report.config.model_copy(update=changes)
    config = ReportConfig.model_validate(config.model_dump())
    return build_report(report.tensor, config, report.provenance.run_config_hash)


# ============================================================================
# TABLE VIEWS
# ============================================================================


def mark_cells(report: BenchmarkReport, task: str) -> RowMarks:
    """
    Mark each model of a task row as winner, tie, plain or incompatible.

    The winner has the best mean under the task direction (exact ties go to registry
    order and set tie_broken). A model is a tie iff its closed interval [mean - h, mean + h]
    intersects the winner's.
    """
    spec = report.tensor.task(task)
    present = [c for c in (report.cell(task, m) for m in report.tensor.models) if c is not None]

    winner: Optional[CellSummary] = None
    for cell in present:
        if winner is None or spec.direction.is_better(cell.mean, winner.mean):
            winner = cell
    tie_broken = winner is not None and any(
        c.mean == winner.mean and c.model != winner.model for c in present
    )

    marks: Dict[str, CellMark] = {}
    for model in report.tensor.models:
        cell = report.cell(task, model)
        if cell is None:
            marks[model] = CellMark.INCOMPATIBLE
        elif winner is not None and cell.model == winner.model:
            marks[model] = CellMark.WINNER
        elif winner is not None and (
            cell.mean - cell.halfwidth <= winner.mean + winner.halfwidth
            and winner.mean - winner.halfwidth <= cell.mean + cell.halfwidth
        ):
            marks[model] = CellMark.TIE
        else:
            marks[model] = CellMark.PLAIN
    return RowMarks(
        task=task, winner=winner.model if winner else None, marks=marks, tie_broken=tie_broken
    )


def summary_table(report: BenchmarkReport) -> List[SummaryRow]:
    """One row per (task, model) in registry order; incompatible cells render as n/a."""
    rows: List[SummaryRow] = []
    for spec in report.tensor.tasks:
        marks = mark_cells(report, spec.name)
        for model in report.tensor.models:
            cell = report.cell(spec.name, model)
            mean = cell.mean if cell else None
            halfwidth = cell.halfwidth if cell else None
            rows.append(
                SummaryRow(
                    task=spec.name,
                    category=spec.category,
                    model=model,
                    mean=mean,
                    halfwidth=halfwidth,
                    mark=marks[model],
                    direction=spec.direction,
                    text=format_cell(mean, halfwidth),
                )
            )
    return rows


def pairwise_table(
    report: BenchmarkReport, method: Optional[PairwiseMethod] = None
) -> List[PairwiseRow]:
    """
    Flatten the per-task families into rows.

    significant uses the selected method (both: both adjusted p below alpha);
    agree compares the two tests' verdicts at the report alpha.
    method defaults to the report's configured pairwise_method.
    """
    method = method or report.config.pairwise_method
    if method not in ("t", "wilcoxon", "both"):
        raise InvalidArgumentError(f"Unknown pairwise method: {method}", details={"method": method})
    alpha = report.config.alpha

    rows: List[PairwiseRow] = []
    for family in report.pairwise:
        for r in family.results:
            sig_t = r.p_t_holm < alpha
            sig_w = r.p_w_holm < alpha
            significant = {"t": sig_t, "wilcoxon": sig_w, "both": sig_t and sig_w}[method]
            rows.append(
                PairwiseRow(
                    task=r.task,
                    model_a=r.model_a,
                    model_b=r.model_b,
                    delta_mu=r.delta_mu,
                    p_holm_t=r.p_t_holm,
                    p_holm_w=r.p_w_holm,
                    agree=sig_t == sig_w,
                    significant=significant,
                )
            )
    return rows
