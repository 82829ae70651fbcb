"""Algorithm orchestration: registry, reseeding and the seed loop."""

from .orchestrator import BenchmarkRunner, run_benchmark, run_benchmark_async
from .registry import (
    Registry,
    load_registry,
    register_model,
    register_task,
    resolve_tasks,
    unregister_model,
    unregister_task,
)
from .seeding import GeneratorBundle, reseed_all, stream_key

__all__ = [
    "BenchmarkRunner",
    "run_benchmark",
    "run_benchmark_async",
    "Registry",
    "load_registry",
    "register_task",
    "unregister_task",
    "register_model",
    "unregister_model",
    "resolve_tasks",
    "GeneratorBundle",
    "reseed_all",
    "stream_key",
]
