"""
Monte-Carlo calibration of the statistical layer.

- generate_null_tensor(): every model shares the same base per task; only noise differs
- estimate_fwer(): fraction of null benchmarks with any Holm-adjusted pairwise p < alpha
- estimate_clique_coverage(): fraction of null benchmarks whose Nemenyi clique spans all models
- estimate_power(): rejection rate of a two-model paired-t across a grid of base gaps,
  using common random numbers across grid points

Each simulated benchmark draws from its own SeedSequence child of `seed`, so results do not
depend on worker count or execution order.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import beta

from bench_sdk.models import Cell, MetricDirection, MetricTensor, TaskSpec
from bench_sdk.protocol import InvalidArgumentError
from bench_sdk.ranking import find_cliques, nemenyi_cd, rank_task
from bench_sdk.stats import holm_adjust, paired_t, wilcoxon_signed_rank

__all__ = [
    "NULL_TASK_TYPE",
    "CalibrationResult",
    "PowerPoint",
    "PowerCurve",
    "clopper_pearson",
    "generate_null_tensor",
    "estimate_fwer",
    "estimate_clique_coverage",
    "estimate_power",
]

NULL_TASK_TYPE = "synthetic"
_NULL_BASE_RANGE = (0.5, 0.9)

Method = Literal["t", "wilcoxon"]


class CalibrationResult(BaseModel):
    """Outcome of a calibration experiment; `ci` is the Clopper-Pearson interval of `fwer`."""

    model_config = ConfigDict(frozen=True)

    runs: int
    alpha: float
    method: str
    fwer: float = Field(..., description="Empirical rate (FWER, or clique coverage)")
    ci: Tuple[float, float]
    rejections: int
    k: int
    N: int
    S: int
    noise_sd: float
    seed: int
    kind: Literal["fwer", "clique_coverage"] = "fwer"


class PowerPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    gap: float
    power: float
    rejections: int


class PowerCurve(BaseModel):
    model_config = ConfigDict(frozen=True)

    runs: int
    alpha: float
    S: int
    noise_sd: float
    seed: int
    points: Tuple[PowerPoint, ...]


def clopper_pearson(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Exact binomial confidence interval."""
    a = 1.0 - confidence
    lo = 0.0 if successes == 0 else float(beta.ppf(a / 2.0, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(beta.ppf(1.0 - a / 2.0, successes + 1, trials - successes))
    return lo, hi


def _check_dims(k: int, N: int, S: int, noise_sd: float) -> None:
    if k < 1 or N < 1 or S < 1:
        raise InvalidArgumentError(f"k, N and S must be >= 1, got k={k}, N={N}, S={S}")
    if noise_sd < 0:
        raise InvalidArgumentError(f"noise_sd must be >= 0, got {noise_sd}")


def _generator(seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seq))


def _null_values(rng: np.random.Generator, k: int, N: int, S: int, noise_sd: float) -> np.ndarray:
    """N x k x S array: per-task base shared by all models plus iid Gaussian noise."""
    bases = rng.uniform(*_NULL_BASE_RANGE, size=N)
    noise = rng.standard_normal(size=(N, k, S))
    return bases[:, None, None] + noise_sd * noise


def generate_null_tensor(k: int, N: int, S: int, noise_sd: float, seed: int) -> MetricTensor:
    """
    Null-hypothesis tensor with models M1..Mk, tasks T1..TN and seeds 0..S-1.

    Deterministic in seed; noise_sd = 0 makes every cell of a task equal.
    """
    _check_dims(k, N, S, noise_sd)
    values = _null_values(_generator(np.random.SeedSequence(seed)), k, N, S, noise_sd)
    tasks = tuple(
        TaskSpec(name=f"T{t + 1}", category="null", task_type=NULL_TASK_TYPE) for t in range(N)
    )
    models = tuple(f"M{m + 1}" for m in range(k))
    cells = tuple(
        Cell(task=tasks[t].name, model=models[m], seed=s, value=float(values[t, m, s]))
        for t in range(N)
        for m in range(k)
        for s in range(S)
    )
    return MetricTensor(tasks=tasks, models=models, seeds=tuple(range(S)), cells=cells)


def _family_rejects(task_values: np.ndarray, alpha: float, method: Method) -> bool:
    test = paired_t if method == "t" else wilcoxon_signed_rank
    pairs = itertools.combinations(range(task_values.shape[0]), 2)
    p_raw = [test(task_values[a], task_values[b]).p_value for a, b in pairs]
    return any(p < alpha for p in holm_adjust(p_raw))


def _run_many(runs: int, seed: int, workers: int, one_run: Callable[[np.random.Generator], bool]) -> int:
    children = np.random.SeedSequence(seed).spawn(runs)
    if workers <= 1:
        outcomes = [one_run(_generator(child)) for child in children]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda child: one_run(_generator(child)), children))
    return int(sum(outcomes))


def estimate_fwer(
    runs: int,
    k: int,
    N: int,
    S: int,
    noise_sd: float,
    alpha: float,
    method: Method,
    seed: int,
    workers: int = 1,
) -> CalibrationResult:
    """
    Empirical family-wise error rate of per-task Holm-corrected pairwise tests under the null.

    A simulated benchmark counts as a false positive when any task's family has an
    adjusted p below alpha.
    """
    if runs < 1:
        raise InvalidArgumentError(f"runs must be >= 1, got {runs}")
    if method not in ("t", "wilcoxon"):
        raise InvalidArgumentError(f"Unknown calibration method: {method}", details={"method": method})
    _check_dims(k, N, S, noise_sd)
    if k < 2 or S < 2:
        raise InvalidArgumentError("FWER calibration needs k >= 2 and S >= 2")

    def one_run(rng: np.random.Generator) -> bool:
        values = _null_values(rng, k, N, S, noise_sd)
        return any(_family_rejects(values[t], alpha, method) for t in range(N))

    rejections = _run_many(runs, seed, workers, one_run)
    return CalibrationResult(
        runs=runs,
        alpha=alpha,
        method=method,
        fwer=rejections / runs,
        ci=clopper_pearson(rejections, runs),
        rejections=rejections,
        k=k,
        N=N,
        S=S,
        noise_sd=noise_sd,
        seed=seed,
    )


def estimate_clique_coverage(
    runs: int,
    k: int,
    N: int,
    S: int,
    noise_sd: float,
    alpha: float,
    seed: int,
    workers: int = 1,
) -> CalibrationResult:
    """Fraction of null benchmarks in which one Nemenyi clique covers all k models."""
    if runs < 1:
        raise InvalidArgumentError(f"runs must be >= 1, got {runs}")
    _check_dims(k, N, S, noise_sd)
    cd = nemenyi_cd(k, N, alpha)

    def one_run(rng: np.random.Generator) -> bool:
        means = _null_values(rng, k, N, S, noise_sd).mean(axis=2)
        ranks = np.array([rank_task(row, MetricDirection.HIGHER_IS_BETTER) for row in means])
        mean_ranks = ranks.mean(axis=0)
        if float(mean_ranks.max() - mean_ranks.min()) == 0.0:
            return True
        return any(len(c) == k for c in find_cliques(mean_ranks.tolist(), cd))

    covered = _run_many(runs, seed, workers, one_run)
    return CalibrationResult(
        runs=runs,
        alpha=alpha,
        method="nemenyi",
        fwer=covered / runs,
        ci=clopper_pearson(covered, runs),
        rejections=covered,
        k=k,
        N=N,
        S=S,
        noise_sd=noise_sd,
        seed=seed,
        kind="clique_coverage",
    )


def estimate_power(
    gaps: Sequence[float],
    runs: int,
    S: int,
    noise_sd: float,
    alpha: float,
    seed: int,
    base: float = 0.7,
) -> PowerCurve:
    """
    Rejection rate of the paired t-test between two models whose bases differ by each gap.

    The same noise draws are reused at every grid point (common random numbers), so for
    fixed noise the curve reflects the gap alone.
    """
    if runs < 1:
        raise InvalidArgumentError(f"runs must be >= 1, got {runs}")
    _check_dims(2, 1, S, noise_sd)
    if S < 2:
        raise InvalidArgumentError("power estimation needs S >= 2")

    rng = _generator(np.random.SeedSequence(seed))
    noise = noise_sd * rng.standard_normal(size=(runs, 2, S))
    points: List[PowerPoint] = []
    for gap in gaps:
        rejections = 0
        for r in range(runs):
            a = base + gap + noise[r, 0]
            b = base + noise[r, 1]
            p = holm_adjust([paired_t(a, b).p_value])[0]
            if p < alpha:
                rejections += 1
        points.append(PowerPoint(gap=float(gap), power=rejections / runs, rejections=rejections))
    return PowerCurve(runs=runs, alpha=alpha, S=S, noise_sd=noise_sd, seed=seed, points=tuple(points))
