"""
Task and model registry.

A Registry is a plain object (no module-level state): two runners with different
registries never see each other's entries. Tasks are stored per category in registration
order; models by name in registration order.

Mutation is single-writer and forbidden while a run holds the registry (see running()).
"""

from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence

from bench_sdk.config_loader import load_registry_config
from bench_sdk.config_models import RegistryConfig
from bench_sdk.models import ModelSpec, TaskSpec
from bench_sdk.protocol import (
    DuplicateRegistrationError,
    EmptySelectionError,
    RegistryLockedError,
    UnknownModelError,
    UnknownTaskError,
)

__all__ = [
    "Registry",
    "load_registry",
    "register_task",
    "unregister_task",
    "register_model",
    "unregister_model",
    "resolve_tasks",
]

TaskSelector = Optional[str | Sequence[str]]


class Registry:
    """In-memory task/model catalog."""

    def __init__(self) -> None:
        self._tasks: Dict[str, List[TaskSpec]] = {}
        self._models: Dict[str, ModelSpec] = {}
        self._factories: Dict[str, Callable] = {}
        self._locked = False

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_config(cls, config: RegistryConfig) -> "Registry":
        registry = cls()
        for category, tasks in config.categories.items():
            registry._tasks.setdefault(category, [])
            for task in tasks:
                registry.register_task(category, task)
        for model in config.models:
            registry.register_model(model)
        return registry

    # ------------------------------------------------------------------
    # Mutation
    # ------------------------------------------------------------------

    def _check_unlocked(self, operation: str) -> None:
        if self._locked:
            raise RegistryLockedError(
                f"Cannot {operation} while a benchmark run holds the registry",
                details={"operation": operation},
            )

    def register_task(self, category: str, spec: TaskSpec) -> TaskSpec:
        """
        Register a task under a category (the task's category is set to it).

        Raises:
            DuplicateRegistrationError: If a task with the same name exists in any category
            RegistryLockedError: If a run holds the registry
        """
        self._check_unlocked("register a task")
        if self.find_task(spec.name) is not None:
            raise DuplicateRegistrationError(
                f"Task already registered: {spec.name}", details={"task": spec.name}
            )
        if spec.category != category:
            spec = spec.model_copy(update={"category": category})
        self._tasks.setdefault(category, []).append(spec)
        return spec

    def unregister_task(self, category: str, name: str) -> TaskSpec:
        """Remove exactly one task; the category stays even when it becomes empty."""
        self._check_unlocked("unregister a task")
        tasks = self._tasks.get(category, [])
        for i, task in enumerate(tasks):
            if task.name == name:
                return tasks.pop(i)
        raise UnknownTaskError(
            f"Task {name} is not registered in category {category}",
            details={"task": name, "category": category},
        )

    def register_model(self, spec: ModelSpec, factory: Optional[Callable] = None) -> ModelSpec:
        self._check_unlocked("register a model")
        if spec.name in self._models:
            raise DuplicateRegistrationError(
                f"Model already registered: {spec.name}", details={"model": spec.name}
            )
        self._models[spec.name] = spec
        if factory is not None:
            self._factories[spec.name] = factory
        return spec

    def unregister_model(self, name: str) -> ModelSpec:
        self._check_unlocked("unregister a model")
        if name not in self._models:
            raise UnknownModelError(f"Model is not registered: {name}", details={"model": name})
        self._factories.pop(name, None)
        return self._models.pop(name)

    def model(
        self, name: str, task_types: Sequence[str], executor_binding: str = "synthetic"
    ) -> Callable[[Callable], Callable]:
        """
        Decorator form of register_model.

        Example:
            @registry.model("GCN", task_types={"node_cls", "link_pred"})
            def build_gcn(task, streams): ...
        """

        def decorator(factory: Callable) -> Callable:
            spec = ModelSpec(
                name=name,
                compatible_task_types=tuple(task_types),
                executor_binding=executor_binding,
            )
            self.register_model(spec, factory)
            return factory

        return decorator

    @contextmanager
    def running(self) -> Iterator["Registry"]:
        """Hold the registry for the duration of a run; mutation inside raises."""
        previous = self._locked
        self._locked = True
        try:
            yield self
        finally:
            self._locked = previous

    # ------------------------------------------------------------------
    # Lookup
    # ------------------------------------------------------------------

    @property
    def locked(self) -> bool:
        return self._locked

    @property
    def categories(self) -> List[str]:
        return list(self._tasks)

    @property
    def models(self) -> List[ModelSpec]:
        return list(self._models.values())

    def tasks(self, category: Optional[str] = None) -> List[TaskSpec]:
        if category is None:
            return [t for tasks in self._tasks.values() for t in tasks]
        if category not in self._tasks:
            raise EmptySelectionError(f"Unknown category: {category}", details={"category": category})
        return list(self._tasks[category])

    def tasks_by_type(self, category: str) -> Dict[str, List[TaskSpec]]:
        """category -> task_type -> tasks view, in registration order."""
        grouped: Dict[str, List[TaskSpec]] = {}
        for task in self.tasks(category):
            grouped.setdefault(task.task_type, []).append(task)
        return grouped

    def find_task(self, name: str) -> Optional[TaskSpec]:
        for tasks in self._tasks.values():
            for task in tasks:
                if task.name == name:
                    return task
        return None

    def get_task(self, name: str) -> TaskSpec:
        task = self.find_task(name)
        if task is None:
            raise UnknownTaskError(f"Unknown task: {name}", details={"task": name})
        return task

    def get_model(self, name: str) -> ModelSpec:
        try:
            return self._models[name]
        except KeyError:
            raise UnknownModelError(f"Unknown model: {name}", details={"model": name})

    def factory(self, name: str) -> Optional[Callable]:
        return self._factories.get(name)

    def resolve_tasks(self, selector: TaskSelector = None, task_type: Optional[str] = None) -> List[TaskSpec]:
        """
        Resolve a selector into an ordered task list.

        selector is a category name, an explicit list of task names, or None for every
        registered task. Order is registration order in all cases.

        Raises:
            EmptySelectionError: Unknown category, or nothing left after filtering
            UnknownTaskError: An explicit task name is not registered
        """
        if selector is None:
            candidates = self.tasks()
        elif isinstance(selector, str):
            candidates = self.tasks(selector)
        else:
            wanted = set()
            for name in selector:
                wanted.add(self.get_task(name).name)
            candidates = [t for t in self.tasks() if t.name in wanted]

        if task_type is not None:
            candidates = [t for t in candidates if t.task_type == task_type]
        if not candidates:
            raise EmptySelectionError(
                "Task selection is empty: nothing to benchmark",
                details={"selector": selector, "task_type": task_type},
            )
        return candidates


# ============================================================================
# FUNCTIONAL API
# ============================================================================


def load_registry(path: str | Path) -> Registry:
    """Materialize a Registry from a catalog JSON file."""
    return Registry.from_config(load_registry_config(path))


def register_task(registry: Registry, category: str, spec: TaskSpec) -> TaskSpec:
    return registry.register_task(category, spec)


def unregister_task(registry: Registry, category: str, name: str) -> TaskSpec:
    return registry.unregister_task(category, name)


def register_model(registry: Registry, spec: ModelSpec) -> ModelSpec:
    return registry.register_model(spec)


def unregister_model(registry: Registry, name: str) -> ModelSpec:
    return registry.unregister_model(name)


def resolve_tasks(
    registry: Registry, selector: TaskSelector = None, task_type: Optional[str] = None
) -> List[TaskSpec]:
    return registry.resolve_tasks(selector, task_type)
