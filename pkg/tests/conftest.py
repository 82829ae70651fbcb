"""
Shared test fixtures for the seed-paired benchmark engine.
"""

from typing import List

import pytest

from bench_sdk.config_models import ReportConfig, SyntheticModelParams, SyntheticModelProfile
from bench_sdk.models import MetricTensor, ModelSpec, TaskSpec, load_tensor_json
from tests.helpers import DEMO_TENSOR, TSP_VALUES, make_tensor, task


@pytest.fixture
def report_config() -> ReportConfig:
    return ReportConfig()


@pytest.fixture
def demo_tensor() -> MetricTensor:
    """The bundled ten-category tensor (GIN present on the two graph_cls tasks only)."""
    return load_tensor_json(DEMO_TENSOR)


@pytest.fixture
def tsp_tensor() -> MetricTensor:
    spec = task("TSP-random", category="Combinatorial", metric_name="AUC")
    return make_tensor({(spec.name, m): v for m, v in TSP_VALUES.items()}, [spec], list(TSP_VALUES))


@pytest.fixture
def small_tasks() -> List[TaskSpec]:
    return [
        task("cora", "node_cls", "social"),
        task("mutag", "graph_cls", "biology"),
        task("ising", "link_pred", "physics", seed_aware_data=True),
    ]


@pytest.fixture
def small_models() -> List[ModelSpec]:
    return [
        ModelSpec(name="GCN", compatible_task_types=("node_cls", "graph_cls", "link_pred")),
        ModelSpec(name="GAT", compatible_task_types=("node_cls", "graph_cls", "link_pred")),
        ModelSpec(name="GIN", compatible_task_types=("graph_cls",)),
    ]


@pytest.fixture
def small_profile() -> SyntheticModelProfile:
    return SyntheticModelProfile(
        models={
            "GCN": SyntheticModelParams(base_metric=0.80, noise_sd=0.01),
            "GAT": SyntheticModelParams(base_metric=0.70, noise_sd=0.01),
            "GIN": SyntheticModelParams(base_metric=0.90, noise_sd=0.01),
        }
    )


@pytest.fixture(autouse=True)
def isolated_logs(tmp_path, monkeypatch):
    """Keep log and cache files of every test under its tmp_path."""
    monkeypatch.setenv("BENCH_LOG_ROOT", str(tmp_path / "logs"))
    monkeypatch.setenv("BENCH_CACHE_DIR", str(tmp_path / "cache"))


def pytest_collection_modifyitems(config, items):
    """
    Auto-assign test markers based on folder so unit/integration/e2e selection is reliable.
    """
    for item in items:
        path = str(item.fspath)
        if "/tests/unit/" in path:
            item.add_marker(pytest.mark.unit)
        elif "/tests/integration/" in path:
            item.add_marker(pytest.mark.integration)
        elif "/tests/e2e/" in path:
            item.add_marker(pytest.mark.e2e)
        elif "/tests/edge_cases/" in path:
            item.add_marker(pytest.mark.edge)
