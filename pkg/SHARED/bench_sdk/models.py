"""
Domain types for the metric tensor and the task/model registries.

This module defines typed, immutable models every other module consumes:
- MetricDirection: whether larger or smaller metric values are better
- TaskSpec / ModelSpec: registry entries (task type, direction, compatibility)
- MetricTensor: per-(task, model, seed) final metrics; absent pairs mean incompatible
- TrialRequest / TrialOutcome: one scheduled trial and its recorded result

Operations:
- validate_tensor(): list every invariant violation of a tensor
- seed_intersection(): models that have cells on a task, in registry order
- encode_tensor() / decode_tensor(): JSON form (schema_version 1)
- load_tensor_csv(): CSV form (task,model,seed,value) with a sidecar task-spec JSON
"""

import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator

from .protocol import TensorValidationError, UnknownModelError, UnknownTaskError, check_finite_series

__all__ = [
    "KNOWN_TASK_TYPES",
    "TENSOR_SCHEMA_VERSION",
    "MetricDirection",
    "TaskSpec",
    "ModelSpec",
    "Cell",
    "EpochSeries",
    "MetricTensor",
    "ValidationVerdict",
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
]

KNOWN_TASK_TYPES = ("node_cls", "graph_cls", "graph_reg", "link_pred")
TENSOR_SCHEMA_VERSION = 1

CellKey = Tuple[str, str, int]


class MetricDirection(str, Enum):
    """Metric direction: accuracy and AUC are higher-is-better, MAE is lower-is-better."""

    HIGHER_IS_BETTER = "higher_is_better"
    LOWER_IS_BETTER = "lower_is_better"

    @property
    def sign(self) -> float:
        """+1 when larger values are better, -1 otherwise."""
        return 1.0 if self is MetricDirection.HIGHER_IS_BETTER else -1.0

    def is_better(self, a: float, b: float) -> bool:
        """Return True if value a is strictly better than value b."""
        return self.sign * a > self.sign * b

    @property
    def arrow(self) -> str:
        return "↑" if self is MetricDirection.HIGHER_IS_BETTER else "↓"


class TaskSpec(BaseModel):
    """
    Registry entry for one benchmark task.

    Task types are open: the four built-in tags plus any custom tag.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., min_length=1, description="Task identifier, unique within a registry")
    category: str = Field(..., min_length=1, description="Category the task belongs to")
    task_type: str = Field(
        ..., min_length=1, description="node_cls | graph_cls | graph_reg | link_pred | custom tag"
    )
    metric_name: str = Field(default="metric", description="Free-text metric name (never interpreted)")
    direction: MetricDirection = Field(default=MetricDirection.HIGHER_IS_BETTER)
    epochs: int = Field(default=1, ge=1, description="Epoch budget passed to executors")
    seed_aware_data: bool = Field(
        default=False, description="Data generation receives the benchmark seed"
    )


class ModelSpec(BaseModel):
    """Registry entry for one model and the task types it can run on."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., min_length=1)
    compatible_task_types: Tuple[str, ...] = Field(..., min_length=1)
    executor_binding: str = Field(
        default="synthetic", description="Name of the trial executor that runs this model"
    )

    @field_validator("compatible_task_types")
    @classmethod
    def canonicalize_task_types(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        if any(not tag for tag in v):
            raise ValueError("task-type tags must be non-empty")
        return tuple(sorted(set(v)))

    def is_compatible(self, task: TaskSpec) -> bool:
        return task.task_type in self.compatible_task_types


class Cell(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    task: str
    model: str
    seed: int
    value: float

    @property
    def key(self) -> CellKey:
        return (self.task, self.model, self.seed)


class EpochSeries(BaseModel):
    """Per-epoch metric series of one trial; stored for provenance, never analyzed."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    task: str
    model: str
    seed: int
    values: Tuple[float, ...]

    @field_validator("values")
    @classmethod
    def validate_values(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        check_finite_series(v)
        return v


class MetricTensor(BaseModel):
    """
    Per-seed final metrics X[t, m, s].

    A tensor may be constructed with violations (ragged seeds, NaN, duplicates) so that
    validate_tensor() can report them; consumers call validate_tensor() first.
    Cells are kept in canonical (task, model, seed) registry order whatever the input order.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    tasks: Tuple[TaskSpec, ...]
    models: Tuple[str, ...]
    seeds: Tuple[int, ...]
    cells: Tuple[Cell, ...]
    per_epoch: Tuple[EpochSeries, ...] = ()

    _index: Dict[CellKey, float] = PrivateAttr(default_factory=dict)
    _task_lookup: Dict[str, TaskSpec] = PrivateAttr(default_factory=dict)
    _pairs: set = PrivateAttr(default_factory=set)

    @field_validator("cells")
    @classmethod
    def sort_cells(cls, v: Tuple[Cell, ...], info) -> Tuple[Cell, ...]:
        tasks = info.data.get("tasks", ())
        models = info.data.get("models", ())
        seeds = info.data.get("seeds", ())
        task_pos = {t.name: i for i, t in reversed(list(enumerate(tasks)))}
        model_pos = {m: i for i, m in reversed(list(enumerate(models)))}
        seed_pos = {s: i for i, s in reversed(list(enumerate(seeds)))}

        def order(cell: Cell) -> Tuple[int, str, int, str, int, int]:
            return (
                task_pos.get(cell.task, len(task_pos)),
                cell.task,
                model_pos.get(cell.model, len(model_pos)),
                cell.model,
                seed_pos.get(cell.seed, len(seed_pos)),
                cell.seed,
            )

        return tuple(sorted(v, key=order))

    def model_post_init(self, __context: Any) -> None:
        self._task_lookup = {t.name: t for t in self.tasks}
        self._index = {}
        for cell in self.cells:
            self._index.setdefault(cell.key, cell.value)
        self._pairs = {(cell.task, cell.model) for cell in self.cells}

    # ------------------------------------------------------------------
    # Lookups
    # ------------------------------------------------------------------

    @property
    def task_names(self) -> List[str]:
        return [t.name for t in self.tasks]

    def task(self, name: str) -> TaskSpec:
        """Return the TaskSpec for a task name or raise UnknownTaskError."""
        try:
            return self._task_lookup[name]
        except KeyError:
            raise UnknownTaskError(f"Unknown task: {name}", details={"task": name})

    def has_pair(self, task: str, model: str) -> bool:
        return (task, model) in self._pairs

    def value(self, task: str, model: str, seed: int) -> float:
        try:
            return self._index[(task, model, seed)]
        except KeyError:
            raise LookupError(f"No cell at ({task}, {model}, seed={seed})")

    def pair_values(self, task: str, model: str) -> np.ndarray:
        """Return the seed-ordered values of one (task, model) pair."""
        self.task(task)
        if model not in self.models:
            raise UnknownModelError(f"Unknown model: {model}", details={"model": model})
        return np.array([self.value(task, model, s) for s in self.seeds], dtype=np.float64)

    def seed_mean(self, task: str, model: str) -> float:
        return float(np.mean(self.pair_values(task, model)))


class ValidationVerdict(BaseModel):
    """Result of validate_tensor(): ok iff no violations."""

    model_config = ConfigDict(frozen=True)

    violations: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_invalid(self) -> None:
        if self.violations:
            raise TensorValidationError(
                f"Metric tensor is invalid ({len(self.violations)} violation(s)): "
                f"{self.violations[0]}",
                self.violations,
            )


class TrialRequest(BaseModel):
    """One scheduled trial: (task, model, seed, epochs)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    task: TaskSpec
    model: ModelSpec
    seed: int
    epochs: int = Field(..., ge=1)

    @property
    def key(self) -> CellKey:
        return (self.task.name, self.model.name, self.seed)


class TrialOutcome(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    final_metric: float
    per_epoch: Optional[Tuple[float, ...]] = None
    wall_time_sec: float = Field(default=0.0, ge=0.0)

    @field_validator("final_metric")
    @classmethod
    def validate_final_metric(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("final_metric must be finite")
        return v

    @field_validator("per_epoch")
    @classmethod
    def validate_per_epoch(cls, v: Optional[Tuple[float, ...]]) -> Optional[Tuple[float, ...]]:
        if v is not None:
            check_finite_series(v)
        return v


# ============================================================================
# OPERATIONS
# ============================================================================


def validate_tensor(tensor: MetricTensor) -> ValidationVerdict:
    """
    Collect every invariant violation of a metric tensor.

    Checks:
    - duplicate task or model names
    - seeds empty, duplicated or not strictly increasing
    - cells referencing unknown tasks, models or seeds
    - duplicate (task, model, seed) keys
    - non-finite values
    - ragged seed sets: a present (task, model) pair missing some listed seed
    """
    violations: List[str] = []

    task_names = tensor.task_names
    for name in sorted({n for n in task_names if task_names.count(n) > 1}):
        violations.append(f"duplicate task name {name}")
    for name in sorted({m for m in tensor.models if tensor.models.count(m) > 1}):
        violations.append(f"duplicate model name {name}")

    if not tensor.seeds:
        violations.append("seed list is empty")
    elif any(b <= a for a, b in zip(tensor.seeds, tensor.seeds[1:])):
        violations.append("seeds must be strictly increasing and distinct")

    known_tasks = set(task_names)
    known_models = set(tensor.models)
    known_seeds = set(tensor.seeds)
    seen: set = set()
    pair_seeds: Dict[Tuple[str, str], set] = {}
    for cell in tensor.cells:
        if cell.task not in known_tasks:
            violations.append(f"unknown task {cell.task} in cells")
            continue
        if cell.model not in known_models:
            violations.append(f"unknown model {cell.model} in cells")
            continue
        if cell.seed not in known_seeds:
            violations.append(f"unknown seed {cell.seed} at ({cell.task},{cell.model})")
            continue
        if cell.key in seen:
            violations.append(f"duplicate key ({cell.task},{cell.model},seed={cell.seed})")
            continue
        seen.add(cell.key)
        if not math.isfinite(cell.value):
            violations.append(f"non-finite value at ({cell.task},{cell.model},seed={cell.seed})")
        pair_seeds.setdefault((cell.task, cell.model), set()).add(cell.seed)

    for (task, model), seeds in pair_seeds.items():
        if seeds != known_seeds:
            violations.append(f"ragged seed set at ({task},{model})")

    return ValidationVerdict(violations=tuple(violations))


def seed_intersection(tensor: MetricTensor, task: str) -> List[str]:
    """
    Return the models with cells on a task, in registry order.

    Raises:
        UnknownTaskError: If the task is not in the tensor
    """
    tensor.task(task)
    return [m for m in tensor.models if tensor.has_pair(task, m)]


# ============================================================================
# SERIALIZATION
# ============================================================================


def encode_tensor(tensor: MetricTensor) -> Dict[str, Any]:
    """Encode a tensor as the schema_version 1 JSON document."""
    data: Dict[str, Any] = {
        "schema_version": TENSOR_SCHEMA_VERSION,
        "tasks": [t.model_dump(mode="json") for t in tensor.tasks],
        "models": list(tensor.models),
        "seeds": list(tensor.seeds),
        "cells": [c.model_dump(mode="json") for c in tensor.cells],
    }
    if tensor.per_epoch:
        data["per_epoch"] = [s.model_dump(mode="json") for s in tensor.per_epoch]
    return data


def decode_tensor(data: Dict[str, Any]) -> MetricTensor:
    """
    Decode a schema_version 1 JSON document into a MetricTensor.

    Raises:
        TensorValidationError: If the document is not a version-1 tensor
    """
    version = data.get("schema_version", TENSOR_SCHEMA_VERSION)
    if version != TENSOR_SCHEMA_VERSION:
        raise TensorValidationError(
            f"Unsupported tensor schema_version {version!r}", [f"schema_version={version!r}"]
        )
    missing = [k for k in ("tasks", "models", "seeds", "cells") if k not in data]
    if missing:
        raise TensorValidationError(
            f"Tensor document is missing fields: {missing}", [f"missing field {k}" for k in missing]
        )
    payload = {k: data[k] for k in ("tasks", "models", "seeds", "cells")}
    if "per_epoch" in data:
        payload["per_epoch"] = data["per_epoch"]
    return MetricTensor.model_validate(payload)


def load_tensor_json(file_path: str | Path) -> MetricTensor:
    path = Path(file_path)
    if not path.exists():
        raise FileNotFoundError(f"Tensor file not found: {file_path}")
    return decode_tensor(json.loads(path.read_text(encoding="utf-8")))


def save_tensor_json(tensor: MetricTensor, file_path: str | Path) -> None:
    from .repositories import atomic_write

    atomic_write(file_path, encode_tensor(tensor))


def _load_task_sidecar(tasks_path: Path) -> Tuple[List[TaskSpec], Optional[List[str]]]:
    data = json.loads(tasks_path.read_text(encoding="utf-8"))
    if isinstance(data, list):
        return [TaskSpec.model_validate(t) for t in data], None
    tasks = [TaskSpec.model_validate(t) for t in data.get("tasks", [])]
    return tasks, data.get("models")


def load_tensor_csv(csv_path: str | Path, tasks_path: str | Path) -> MetricTensor:
    """
    Load a tensor from CSV (header task,model,seed,value) plus a task-spec JSON sidecar.

    The sidecar is either a list of TaskSpec objects or {"tasks": [...], "models": [...]}.
    Without an explicit model order, models are ordered by first appearance in the CSV.
    Seeds are the sorted distinct seeds of the file.
    """
    csv_file = Path(csv_path)
    sidecar = Path(tasks_path)
    for path in (csv_file, sidecar):
        if not path.exists():
            raise FileNotFoundError(f"Tensor input not found: {path}")

    frame = pd.read_csv(csv_file, dtype={"task": str, "model": str})
    required = ["task", "model", "seed", "value"]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise TensorValidationError(
            f"CSV is missing columns: {missing}", [f"missing column {c}" for c in missing]
        )

    tasks, model_order = _load_task_sidecar(sidecar)
    if model_order is None:
        model_order = list(dict.fromkeys(frame["model"].tolist()))
    seeds = sorted({int(s) for s in frame["seed"].tolist()})
    cells = [
        Cell(task=row.task, model=row.model, seed=int(row.seed), value=float(row.value))
        for row in frame.itertuples(index=False)
    ]
    return MetricTensor(
        tasks=tuple(tasks), models=tuple(model_order), seeds=tuple(seeds), cells=tuple(cells)
    )


def tensor_from_values(
    tasks: Sequence[TaskSpec],
    models: Sequence[str],
    seeds: Sequence[int],
    values: Dict[Tuple[str, str], Sequence[float]],
) -> MetricTensor:
    """Build a tensor from per-pair seed-ordered value lists (absent pairs = incompatible)."""
    cells = [
        Cell(task=task, model=model, seed=seed, value=float(v))
        for (task, model), series in values.items()
        for seed, v in zip(seeds, series)
    ]
    return MetricTensor(
        tasks=tuple(tasks), models=tuple(models), seeds=tuple(seeds), cells=tuple(cells)
    )
