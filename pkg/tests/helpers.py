"""Builders and paths shared by the test modules."""

from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from bench_sdk.models import MetricTensor, TaskSpec, tensor_from_values

REPO_ROOT = Path(__file__).resolve().parent.parent
DEMO_TENSOR = REPO_ROOT / "SHARED" / "data" / "demo" / "cross_category_tensor.json"
DEMO_REGISTRY = REPO_ROOT / "SHARED" / "config" / "registry" / "benchmark_registry.json"
DEMO_RUN = REPO_ROOT / "SHARED" / "config" / "runs" / "cross_category_demo.json"

# Combinatorial row: four models, ten seeds
TSP_VALUES: Dict[str, List[float]] = {
    "GCN": [0.84, 0.85, 0.86, 0.87, 0.88, 0.85, 0.86, 0.87, 0.88, 0.88],
    "GAT": [0.82, 0.83, 0.83, 0.84, 0.83, 0.82, 0.84, 0.83, 0.84, 0.84],
    "SAGE": [0.87, 0.88, 0.89, 0.88, 0.89, 0.88, 0.89, 0.90, 0.88, 0.88],
    "GT": [0.85, 0.86, 0.87, 0.88, 0.89, 0.86, 0.87, 0.87, 0.88, 0.88],
}


def task(name: str, task_type: str = "link_pred", category: str = "cat", **kwargs) -> TaskSpec:
    return TaskSpec(name=name, category=category, task_type=task_type, **kwargs)


def make_tensor(
    rows: Dict[Tuple[str, str], Sequence[float]],
    tasks: Sequence[TaskSpec],
    models: Sequence[str],
    seeds: Sequence[int] = tuple(range(10)),
) -> MetricTensor:
    return tensor_from_values(tasks, models, seeds, rows)
