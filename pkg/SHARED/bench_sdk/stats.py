"""
Numerical kernels for per-cell estimation and per-task pairwise testing.

- cell_estimate: seed mean, unbiased variance, Student-t CI half-width
- bootstrap_halfwidth: symmetric half-width of the percentile-bootstrap interval
- paired_t: seed-paired t-test with Cohen's d_z
- wilcoxon_signed_rank: exact null up to 20 non-zero differences, normal approximation above
- holm_adjust: Holm step-down adjustment
- pairwise_task: both tests for every model pair of one task, Holm within the task family

t and chi-square distribution functions come from scipy.special (regularized incomplete
beta and gamma functions). All functions are pure.
"""

import itertools
import math
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import special
from scipy.stats import rankdata

from .config_models import BootstrapSpec, ReportConfig
from .models import MetricTensor, seed_intersection
from .protocol import InsufficientModelsError, InsufficientSamplesError, InvalidArgumentError

__all__ = [
    "WILCOXON_EXACT_MAX_N",
    "CellEstimate",
    "PairedTResult",
    "WilcoxonResult",
    "CellSummary",
    "PairwiseResult",
    "t_quantile",
    "t_two_sided_p",
    "chi2_sf",
    "cell_estimate",
    "paired_t",
    "wilcoxon_signed_rank",
    "holm_adjust",
    "bootstrap_halfwidth",
    "pairwise_task",
]

WILCOXON_EXACT_MAX_N = 20

# sd of paired differences at or below this (relative to the data scale) counts as zero
_ZERO_SPREAD_RTOL = 1e-12
_BOOTSTRAP_CHUNK = 1_000_000
_MASK_64 = 0xFFFFFFFFFFFFFFFF


class CellEstimate(NamedTuple):
    mean: float
    variance: float
    halfwidth: float


class PairedTResult(NamedTuple):
    t_stat: Optional[float]
    p_value: float
    dz: Optional[float]
    degenerate: bool


class WilcoxonResult(NamedTuple):
    w_stat: float
    p_value: float
    n_effective: int


class CellSummary(BaseModel):
    """Mean and CI half-width of one (task, model) cell."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    task: str
    model: str
    mean: float
    halfwidth: float
    n_seeds: int
    ci_method: str
    alpha: float


class PairwiseResult(BaseModel):
    """
    Both paired tests for one (model_a, model_b) pair on one task.

    delta_mu is mean(a) - mean(b) in raw metric units (not direction-adjusted).
    t_stat and dz are None when undefined (zero spread with non-zero mean difference).
    """

    model_config = ConfigDict(frozen=True, extra="forbid", protected_namespaces=())

    task: str
    model_a: str
    model_b: str
    delta_mu: float
    t_stat: Optional[float]
    p_t_raw: float
    p_t_holm: float
    w_stat: float
    p_w_raw: float
    p_w_holm: float
    n_effective: int
    dz: Optional[float]
    degenerate: bool


# ============================================================================
# DISTRIBUTION FUNCTIONS
# ============================================================================


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError(f"alpha must be in (0, 1), got {alpha}", details={"alpha": alpha})


def t_quantile(df: int, p: float) -> float:
    """
    Inverse CDF of Student's t with df degrees of freedom.

    Example:
        >>> round(t_quantile(9, 0.975), 6)
        2.262157
    """
    if df < 1:
        raise InvalidArgumentError(f"df must be >= 1, got {df}", details={"df": df})
    if not 0.0 < p < 1.0:
        raise InvalidArgumentError(f"p must be in (0, 1), got {p}", details={"p": p})
    return float(special.stdtrit(df, p))


def t_two_sided_p(t_stat: float, df: int) -> float:
    """Two-sided p-value of a t statistic."""
    return float(min(1.0, 2.0 * special.stdtr(df, -abs(t_stat))))


def chi2_sf(x: float, df: int) -> float:
    """Survival function of the chi-square distribution."""
    return float(special.chdtrc(df, max(x, 0.0)))


# ============================================================================
# PER-CELL ESTIMATION
# ============================================================================


def _as_samples(samples: Sequence[float]) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidArgumentError("samples must be one-dimensional")
    return x


def cell_estimate(samples: Sequence[float], alpha: float) -> CellEstimate:
    """
    Seed mean, unbiased variance and Student-t half-width t_{S-1,1-a/2} * sd / sqrt(S).

    Raises:
        InsufficientSamplesError: If fewer than 2 samples are given
        InvalidArgumentError: If alpha is outside (0, 1)
    """
    _check_alpha(alpha)
    x = _as_samples(samples)
    n = x.size
    if n < 2:
        raise InsufficientSamplesError(
            f"cell_estimate needs at least 2 samples, got {n}", details={"n_seeds": n}
        )
    mean = float(np.mean(x))
    variance = float(np.var(x, ddof=1))
    halfwidth = t_quantile(n - 1, 1.0 - alpha / 2.0) * math.sqrt(variance) / math.sqrt(n)
    return CellEstimate(mean, variance, halfwidth)


def bootstrap_halfwidth(samples: Sequence[float], alpha: float, spec: BootstrapSpec) -> float:
    """
    Half-width of the symmetric envelope with the width of the percentile bootstrap interval.

    The sample is sorted before index resampling, so the result depends only on the
    multiset of values, alpha, B and the seed. Resampling uses a Philox generator seeded
    from spec.seed alone; global RNG state is never read.
    """
    _check_alpha(alpha)
    x = np.sort(_as_samples(samples))
    n = x.size
    if n == 0:
        raise InsufficientSamplesError("bootstrap_halfwidth needs a non-empty sample")

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(spec.seed & _MASK_64)))
    rows_per_chunk = max(1, _BOOTSTRAP_CHUNK // n)
    means = np.empty(spec.B, dtype=np.float64)
    for start in range(0, spec.B, rows_per_chunk):
        stop = min(spec.B, start + rows_per_chunk)
        idx = rng.integers(0, n, size=(stop - start, n))
        means[start:stop] = x[idx].mean(axis=1)

    lo, hi = np.quantile(means, [alpha / 2.0, 1.0 - alpha / 2.0])
    return float(0.5 * (hi - lo))


# ============================================================================
# PAIRED TESTS
# ============================================================================


def _paired(xs: Sequence[float], ys: Sequence[float]) -> tuple:
    x = _as_samples(xs)
    y = _as_samples(ys)
    if x.size != y.size:
        raise InvalidArgumentError(
            f"paired samples differ in length: {x.size} vs {y.size}",
            details={"len_x": int(x.size), "len_y": int(y.size)},
        )
    return x, y


def paired_t(xs: Sequence[float], ys: Sequence[float]) -> PairedTResult:
    """
    Seed-paired t-test on d_s = x_s - y_s, referred two-sided to t_{S-1}.

    Zero spread of the differences is degenerate:
    - mean difference zero: T = 0, p = 1, d_z = 0
    - mean difference non-zero: T and d_z undefined (None), p = 0
    """
    x, y = _paired(xs, ys)
    n = x.size
    if n < 2:
        raise InsufficientSamplesError(f"paired_t needs at least 2 pairs, got {n}")

    d = x - y
    dbar = float(np.mean(d))
    sd = float(np.std(d, ddof=1))
    tol = _ZERO_SPREAD_RTOL * max(1.0, float(np.max(np.abs(np.concatenate([x, y])))))
    if sd <= tol:
        if abs(dbar) <= tol:
            return PairedTResult(0.0, 1.0, 0.0, True)
        return PairedTResult(None, 0.0, None, True)

    t_stat = dbar / (sd / math.sqrt(n))
    return PairedTResult(t_stat, t_two_sided_p(t_stat, n - 1), dbar / sd, False)


def _exact_signed_rank_p(doubled_ranks: np.ndarray, w_doubled_obs: int) -> float:
    """
    P(|W| >= |W_obs|) under the sign-flip null over the observed rank multiset.

    Ranks are doubled so average ranks are integers; counts[s] is the number of the 2^n
    sign assignments whose positive doubled-rank sum is s.
    """
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled_ranks.tolist():
        counts[r:] = counts[r:] + counts[: total + 1 - r]
    sums = np.arange(total + 1)
    extreme = np.abs(2 * sums - total) >= abs(w_doubled_obs)
    return float(counts[extreme].sum() / 2.0 ** doubled_ranks.size)


def wilcoxon_signed_rank(xs: Sequence[float], ys: Sequence[float]) -> WilcoxonResult:
    """
    Wilcoxon signed-rank test on seed-paired differences.

    Zero differences are dropped before ranking; |d| ties get average ranks.
    W = sum of positive ranks minus sum of negative ranks.
    n_effective <= 20: exact two-sided p over all 2^n sign assignments.
    Above: normal approximation on the positive-rank sum with tie-corrected variance
    and a 0.5 continuity correction.
    """
    x, y = _paired(xs, ys)
    d = x - y
    d = d[d != 0.0]
    n = int(d.size)
    if n == 0:
        return WilcoxonResult(0.0, 1.0, 0)

    ranks = rankdata(np.abs(d), method="average")
    t_plus = float(ranks[d > 0].sum())
    w_stat = 2.0 * t_plus - n * (n + 1) / 2.0

    if n <= WILCOXON_EXACT_MAX_N:
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        w_doubled = int(round(2.0 * w_stat))
        return WilcoxonResult(w_stat, min(1.0, _exact_signed_rank_p(doubled, w_doubled)), n)

    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(tie_counts**3 - tie_counts)) / 48.0
    diff = t_plus - mean
    if variance <= 0.0 or abs(diff) <= 0.5:
        return WilcoxonResult(w_stat, 1.0, n)
    z = (abs(diff) - 0.5) / math.sqrt(variance)
    return WilcoxonResult(w_stat, float(min(1.0, 2.0 * special.ndtr(-z))), n)


# ============================================================================
# MULTIPLE COMPARISONS
# ============================================================================


def holm_adjust(p_raw: Sequence[float]) -> List[float]:
    """
    Holm step-down adjustment, aligned with the input order.

    p_(r) adjusted = min(1, max over r' <= r of (m - r' + 1) * p_(r')) on the sorted sequence.
    Equal raw p-values receive equal adjusted values.
    """
    p = np.asarray(p_raw, dtype=np.float64)
    if p.size == 0:
        return []
    if not np.all(np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise InvalidArgumentError("p-values must lie in [0, 1]", details={"p_raw": list(p_raw)})

    m = p.size
    order = np.argsort(p, kind="stable")
    stepped = (m - np.arange(m)) * p[order]
    adjusted_sorted = np.minimum(1.0, np.maximum.accumulate(stepped))

    # ties: every member of a run of equal raw p takes the run's largest adjusted value
    sorted_p = p[order]
    for start in range(m):
        if start > 0 and sorted_p[start] == sorted_p[start - 1]:
            continue
        stop = start
        while stop + 1 < m and sorted_p[stop + 1] == sorted_p[start]:
            stop += 1
        adjusted_sorted[start : stop + 1] = adjusted_sorted[stop]

    adjusted = np.empty(m, dtype=np.float64)
    adjusted[order] = adjusted_sorted
    return [float(v) for v in adjusted]


# ============================================================================
# PER-TASK PAIRWISE FAMILY
# ============================================================================


def pairwise_task(tensor: MetricTensor, task: str, config: ReportConfig) -> List[PairwiseResult]:
    """
    Run paired-t and Wilcoxon for all C(k, 2) model pairs of one task.

    Pairs are in registry order (a before b). Holm is applied separately per test
    over the task's own family.

    Raises:
        UnknownTaskError: If the task is not in the tensor
        InsufficientModelsError: If fewer than 2 models have cells on the task
    """
    models = seed_intersection(tensor, task)
    if len(models) < 2:
        raise InsufficientModelsError(
            f"Task {task} has {len(models)} model(s); pairwise tests need at least 2",
            details={"task": task, "models": models},
        )

    values = {m: tensor.pair_values(task, m) for m in models}
    pairs = list(itertools.combinations(models, 2))
    t_results = [paired_t(values[a], values[b]) for a, b in pairs]
    w_results = [wilcoxon_signed_rank(values[a], values[b]) for a, b in pairs]
    p_t_holm = holm_adjust([r.p_value for r in t_results])
    p_w_holm = holm_adjust([r.p_value for r in w_results])

    return [
        PairwiseResult(
            task=task,
            model_a=a,
            model_b=b,
            delta_mu=float(np.mean(values[a]) - np.mean(values[b])),
            t_stat=t_res.t_stat,
            p_t_raw=t_res.p_value,
            p_t_holm=p_t_holm[i],
            w_stat=w_res.w_stat,
            p_w_raw=w_res.p_value,
            p_w_holm=p_w_holm[i],
            n_effective=w_res.n_effective,
            dz=t_res.dz,
            degenerate=t_res.degenerate,
        )
        for i, ((a, b), t_res, w_res) in enumerate(zip(pairs, t_results, w_results))
    ]
