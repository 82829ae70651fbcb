"""
Unit tests for the task/model registry.
"""

import pytest

from bench_sdk.models import ModelSpec
from bench_sdk.protocol import (
    DuplicateRegistrationError,
    EmptySelectionError,
    RegistryLockedError,
    UnknownModelError,
    UnknownTaskError,
)
from harness.runner.registry import Registry, load_registry, register_task, resolve_tasks, unregister_task
from tests.helpers import DEMO_REGISTRY, task


@pytest.fixture
def registry() -> Registry:
    return load_registry(DEMO_REGISTRY)


@pytest.mark.unit
class TestRegistryLoading:
    """Test materializing the bundled catalog."""

    def test_categories_and_models(self, registry):
        """Test ten categories and five models in file order."""
        assert len(registry.categories) == 10
        assert [m.name for m in registry.models] == ["GCN", "GAT", "SAGE", "GT", "GIN"]

    def test_tasks_by_type(self, registry):
        """Test the category -> task_type -> tasks view."""
        assert list(registry.tasks_by_type("Biology")) == ["graph_cls"]

    def test_independent_instances(self, registry):
        """Test two registries never share entries."""
        other = Registry()
        register_task(other, "Extra", task("only-here"))
        assert registry.find_task("only-here") is None


@pytest.mark.unit
class TestResolveTasks:
    """Test task selection."""

    def test_category(self, registry):
        """Test selecting by category."""
        assert [t.name for t in registry.resolve_tasks("Biology")] == ["MUTAG"]

    def test_all_tasks_in_registration_order(self, registry):
        """Test the default selector."""
        names = [t.name for t in resolve_tasks(registry)]
        assert names[0] == "TSP-random" and names[-1] == "Terrorist-network"
        assert len(names) == 10

    def test_explicit_list_uses_registration_order(self, registry):
        """Test explicit names come back in registry order."""
        assert [t.name for t in registry.resolve_tasks(["Cora", "MUTAG"])] == ["MUTAG", "Cora"]

    def test_task_type_filter(self, registry):
        """Test filtering by task type."""
        graph = registry.resolve_tasks(None, "graph_cls")
        assert [t.name for t in graph] == ["MUTAG", "MNIST-superpixels"]

    def test_unknown_category(self, registry):
        """Test an unknown category is an empty selection."""
        with pytest.raises(EmptySelectionError):
            registry.resolve_tasks("Astronomy")

    def test_filter_to_nothing(self, registry):
        """Test a filter that removes every task."""
        with pytest.raises(EmptySelectionError):
            registry.resolve_tasks("Biology", "node_cls")

    def test_unknown_task_name(self, registry):
        """Test an explicit unknown name."""
        with pytest.raises(UnknownTaskError):
            registry.resolve_tasks(["Cora", "Citeseer"])


@pytest.mark.unit
class TestRegistryMutation:
    """Test registration, removal and locking."""

    def test_register_sets_category(self):
        """Test the task's category follows the registration category."""
        registry = Registry()
        spec = registry.register_task("Physics", task("ising", category="elsewhere"))
        assert spec.category == "Physics"

    def test_duplicate_task_across_categories(self, registry):
        """Test task names are unique over the whole registry."""
        with pytest.raises(DuplicateRegistrationError):
            registry.register_task("Social", task("MUTAG"))

    def test_duplicate_model(self, registry):
        """Test model names are unique."""
        with pytest.raises(DuplicateRegistrationError):
            registry.register_model(ModelSpec(name="GCN", compatible_task_types=("node_cls",)))

    def test_unregister_task_keeps_category(self, registry):
        """Test removing the only task of a category."""
        removed = unregister_task(registry, "Biology", "MUTAG")
        assert removed.name == "MUTAG"
        assert "Biology" in registry.categories
        with pytest.raises(EmptySelectionError):
            registry.resolve_tasks("Biology")

    def test_unregister_unknown(self, registry):
        """Test removing names that are not registered."""
        with pytest.raises(UnknownTaskError):
            registry.unregister_task("Biology", "Cora")
        with pytest.raises(UnknownModelError):
            registry.unregister_model("MLP")

    def test_decorator_registration(self):
        """Test the decorator form keeps the factory."""
        registry = Registry()

        @registry.model("GCN", task_types=("node_cls", "link_pred"))
        def build_gcn(task_spec, streams):
            return "gcn"

        assert registry.get_model("GCN").compatible_task_types == ("link_pred", "node_cls")
        assert registry.factory("GCN") is build_gcn

    def test_locked_while_running(self, registry):
        """Test mutation is refused while a run holds the registry."""
        with registry.running():
            assert registry.locked
            with pytest.raises(RegistryLockedError):
                registry.register_task("Extra", task("late"))
            with pytest.raises(RegistryLockedError):
                registry.unregister_model("GCN")
        assert not registry.locked
        registry.register_task("Extra", task("late"))
