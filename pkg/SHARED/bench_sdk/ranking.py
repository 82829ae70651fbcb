"""
Across-task rank aggregation.

Models are ranked per task on their seed means under the task's metric direction
(rank 1 = best, average ranks for ties). Mean ranks feed the Friedman omnibus test and
the Nemenyi critical difference; cliques are maximal runs of models whose mean-rank
span stays within the CD.
"""

import math
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.stats import rankdata

from .models import MetricDirection, MetricTensor
from .protocol import InsufficientModelsError, InvalidArgumentError
from .stats import chi2_sf

__all__ = [
    "NEMENYI_Q",
    "RankTable",
    "CdResult",
    "FriedmanResult",
    "rank_task",
    "build_rank_table",
    "friedman",
    "nemenyi_cd",
    "find_cliques",
    "cd_analysis",
]

# Studentized range statistic divided by sqrt(2), infinite df, k = 2..20.
NEMENYI_Q: Dict[float, Tuple[float, ...]] = {
    0.05: (
        1.960, 2.344, 2.569, 2.728, 2.850, 2.948, 3.031, 3.102, 3.164, 3.219,
        3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544,
    ),
    0.10: (
        1.645, 2.052, 2.291, 2.460, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978,
        3.030, 3.077, 3.120, 3.159, 3.196, 3.230, 3.261, 3.291, 3.319,
    ),
}  # fmt: skip
NEMENYI_K_MIN = 2
NEMENYI_K_MAX = 20

# mean-rank spans are compared to the CD with this slack for float accumulation
_SPAN_EPS = 1e-9


class RankTable(BaseModel):
    """N x k per-task ranks over the models present on every task."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tasks: Tuple[str, ...]
    models: Tuple[str, ...]
    ranks: Tuple[Tuple[float, ...], ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.ranks, dtype=np.float64).reshape(len(self.tasks), len(self.models))

    def mean_ranks(self) -> List[float]:
        return [float(v) for v in self.as_array().mean(axis=0)]


class FriedmanResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    chi2: float
    p_value: float


class CdResult(BaseModel):
    """
    Friedman + Nemenyi outcome.

    cliques hold model indices (into `models`) ordered by mean rank; each has >= 2 members.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    models: Tuple[str, ...]
    mean_ranks: Tuple[float, ...]
    chi2_friedman: float
    p_friedman: float
    k: int
    N: int
    alpha: float
    cd: float
    cliques: Tuple[Tuple[int, ...], ...]

    def clique_names(self) -> List[List[str]]:
        return [[self.models[i] for i in clique] for clique in self.cliques]


def rank_task(values: Sequence[float], direction: MetricDirection) -> List[float]:
    """
    Rank models on one task: rank 1 = best under direction, ties share average ranks.

    Example:
        >>> rank_task([0.524, 0.609, 0.534, 0.524], MetricDirection.HIGHER_IS_BETTER)
        [3.5, 1.0, 2.0, 3.5]
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise InvalidArgumentError("rank_task needs at least one value")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("rank_task values must be finite", details={"values": list(values)})
    return [float(r) for r in rankdata(-direction.sign * x, method="average")]


def build_rank_table(tensor: MetricTensor) -> RankTable:
    """Rank seed means per task over the models present on every task."""
    universal = [m for m in tensor.models if all(tensor.has_pair(t, m) for t in tensor.task_names)]
    rows = []
    for task in tensor.tasks:
        means = [tensor.seed_mean(task.name, m) for m in universal]
        rows.append(tuple(rank_task(means, task.direction)) if universal else ())
    return RankTable(tasks=tuple(tensor.task_names), models=tuple(universal), ranks=tuple(rows))


def friedman(table: RankTable) -> FriedmanResult:
    """
    Friedman statistic chi2 = 12N/(k(k+1)) * (sum of squared mean ranks - k(k+1)^2/4).

    p is the chi-square survival function with k - 1 degrees of freedom.
    """
    n_tasks, k = len(table.tasks), len(table.models)
    if n_tasks < 2 or k < 2:
        raise InvalidArgumentError(
            f"Friedman test needs N >= 2 and k >= 2, got N={n_tasks}, k={k}",
            details={"N": n_tasks, "k": k},
        )
    mean_ranks = table.as_array().mean(axis=0)
    chi2 = 12.0 * n_tasks / (k * (k + 1)) * (float(np.sum(mean_ranks**2)) - k * (k + 1) ** 2 / 4.0)
    chi2 = max(chi2, 0.0)
    return FriedmanResult(chi2=chi2, p_value=chi2_sf(chi2, k - 1))


def nemenyi_cd(k: int, N: int, alpha: float) -> float:
    """
    Nemenyi critical difference q_alpha * sqrt(k(k+1) / (6N)).

    Only alpha 0.05 and 0.10 are tabulated; other levels are rejected.
    """
    q_row = next((row for a, row in NEMENYI_Q.items() if math.isclose(a, alpha)), None)
    if q_row is None:
        raise InvalidArgumentError(
            f"No Nemenyi critical values for alpha={alpha} (tabulated: 0.05, 0.10)",
            details={"alpha": alpha},
        )
    if not NEMENYI_K_MIN <= k <= NEMENYI_K_MAX:
        raise InvalidArgumentError(
            f"Nemenyi table covers k = {NEMENYI_K_MIN}..{NEMENYI_K_MAX}, got k={k}", details={"k": k}
        )
    if N < 1:
        raise InvalidArgumentError(f"N must be >= 1, got {N}", details={"N": N})
    return q_row[k - NEMENYI_K_MIN] * math.sqrt(k * (k + 1) / (6.0 * N))


def find_cliques(mean_ranks: Sequence[float], cd: float) -> List[Tuple[int, ...]]:
    """
    Maximal contiguous runs (in mean-rank order) of >= 2 models with span <= cd.

    A run contained in an earlier emitted run is dropped. cd <= 0 yields no cliques.
    Returns input indices ordered by mean rank.
    """
    if cd <= 0 or len(mean_ranks) < 2:
        return []
    values = np.asarray(mean_ranks, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ordered = values[order]

    cliques: List[Tuple[int, ...]] = []
    last_end = -1
    end = 0
    for start in range(len(ordered)):
        end = max(end, start)
        while end + 1 < len(ordered) and ordered[end + 1] - ordered[start] <= cd + _SPAN_EPS:
            end += 1
        if end > start and end > last_end:
            cliques.append(tuple(int(i) for i in order[start : end + 1]))
            last_end = end
    return cliques


def cd_analysis(tensor: MetricTensor, alpha: float) -> CdResult:
    """
    Friedman test, Nemenyi CD and cliques over the models present on every task.

    The CD is computed whatever the Friedman verdict.

    Raises:
        InsufficientModelsError: If fewer than 2 models are present on every task
        InvalidArgumentError: If fewer than 2 tasks, or alpha / k are not tabulated
    """
    table = build_rank_table(tensor)
    k, n_tasks = len(table.models), len(table.tasks)
    if k < 2:
        raise InsufficientModelsError(
            f"CD analysis needs >= 2 models present on every task, got {k}",
            details={"models": list(table.models)},
        )
    if n_tasks < 2:
        raise InvalidArgumentError(f"CD analysis needs >= 2 tasks, got {n_tasks}")

    result = friedman(table)
    cd = nemenyi_cd(k, n_tasks, alpha)
    mean_ranks = table.mean_ranks()
    return CdResult(
        models=table.models,
        mean_ranks=tuple(mean_ranks),
        chi2_friedman=result.chi2,
        p_friedman=result.p_value,
        k=k,
        N=n_tasks,
        alpha=alpha,
        cd=cd,
        cliques=tuple(find_cliques(mean_ranks, cd)),
    )
