"""
Benchmark orchestration: the task x compatible-model x seed loop.

Flow of one run:
1. Resolve tasks (registry selector and/or ad-hoc custom tasks) and models
2. Build the schedule, skipping incompatible (task, model) pairs
3. Materialize data: once per task, or once per (task, seed) for seed-aware tasks
4. Execute trials concurrently (bounded), reseeding every trial from (seed, task, model)
5. Merge outcomes in canonical (task, model, seed) order and build the report

Any trial failure cancels the outstanding trials and aborts the run with the failing
(task, model, seed) attached; partial tensors are never reported.
"""

import asyncio
import logging
import time
from typing import Any, Dict, List, Mapping, Optional, Tuple

from pydantic import ValidationError

from bench_sdk.config_models import RunConfig
from bench_sdk.logger import JsonLogger
from bench_sdk.models import (
    Cell,
    EpochSeries,
    MetricTensor,
    ModelSpec,
    TaskSpec,
    TrialOutcome,
    TrialRequest,
)
from bench_sdk.protocol import (
    ConfigError,
    DuplicateRegistrationError,
    EmptySelectionError,
    TrialFailedError,
    TrialSchemaError,
    UnknownTaskError,
)
from bench_sdk.report import BenchmarkReport, build_report
from bench_sdk.repositories import cache_save
from bench_sdk.utils import canonical_json, sha256_hex
from harness.base.executor_base import TrialExecutor
from harness.runner.registry import Registry
from harness.runner.seeding import reseed_all

__all__ = ["BenchmarkRunner", "run_config_hash", "run_benchmark", "run_benchmark_async"]

logger = logging.getLogger(__name__)

ExecutorArg = TrialExecutor | Mapping[str, TrialExecutor]


def run_config_hash(config: RunConfig) -> str:
    """Hash of the run configuration without execution-only knobs (parallelism, timeout, cache)."""
    data = config.model_dump(
        mode="json", exclude={"cache_path": True, "executor": {"parallelism", "timeout_sec"}}
    )
    return sha256_hex(canonical_json(data))


class BenchmarkRunner:
    """
    Runs one RunConfig against a registry and trial executor(s).

    executor is a single TrialExecutor, or a mapping from ModelSpec.executor_binding to
    executors.
    """

    def __init__(
        self,
        registry: Registry,
        executor: ExecutorArg,
        parallelism: int = 1,
        json_logger: Optional[JsonLogger] = None,
    ):
        self.registry = registry
        self.executor = executor
        self.parallelism = max(1, int(parallelism))
        self.json_logger = json_logger

    # ------------------------------------------------------------------
    # Resolution
    # ------------------------------------------------------------------

    def resolve_tasks(self, config: RunConfig) -> List[TaskSpec]:
        uses_registry = config.category is not None or config.tasks is not None
        tasks: List[TaskSpec] = []
        if uses_registry or not config.custom_tasks:
            selector = config.category if config.category is not None else config.tasks
            tasks = self.registry.resolve_tasks(selector, config.task_type)

        custom = list(config.custom_tasks)
        if config.task_type is not None:
            custom = [t for t in custom if t.task_type == config.task_type]
        names = {t.name for t in tasks}
        for task in custom:
            if task.name in names:
                raise DuplicateRegistrationError(
                    f"Custom task collides with a selected task: {task.name}", details={"task": task.name}
                )
            names.add(task.name)
            tasks.append(task)
        if not tasks:
            raise EmptySelectionError("Task selection is empty: nothing to benchmark")

        unknown = sorted(set(config.epochs) - names)
        if unknown:
            raise UnknownTaskError(
                f"Epoch overrides name unselected tasks: {unknown}", details={"tasks": unknown}
            )
        return tasks

    def resolve_models(self, config: RunConfig) -> List[ModelSpec]:
        if config.models:
            models = [self.registry.get_model(name) for name in config.models]
        elif config.custom_models:
            models = []
        else:
            models = self.registry.models
        names = {m.name for m in models}
        for model in config.custom_models:
            if model.name in names:
                raise DuplicateRegistrationError(
                    f"Custom model collides with a selected model: {model.name}",
                    details={"model": model.name},
                )
            names.add(model.name)
            models.append(model)
        if not models:
            raise EmptySelectionError("Model selection is empty: nothing to benchmark")
        return models

    def _executor_for(self, model: ModelSpec) -> TrialExecutor:
        if isinstance(self.executor, TrialExecutor):
            return self.executor
        try:
            return self.executor[model.executor_binding]
        except KeyError:
            raise ConfigError(
                f"No executor bound to {model.executor_binding!r} (model {model.name})",
                details={"model": model.name, "binding": model.executor_binding},
            )

    def build_schedule(
        self, config: RunConfig, tasks: List[TaskSpec], models: List[ModelSpec]
    ) -> Tuple[List[TrialRequest], List[str]]:
        """Canonical-order trial list and the models that have at least one compatible task."""
        seeds = sorted(config.seeds)
        schedule: List[TrialRequest] = []
        used: List[str] = []
        for task in tasks:
            epochs = config.epochs.get(task.name, task.epochs)
            for model in models:
                if not model.is_compatible(task):
                    self._log(
                        "DEBUG",
                        f"Skipping incompatible pair {task.name}/{model.name}",
                        event_type="PAIR_SKIPPED",
                        task=task.name,
                        model=model.name,
                        task_type=task.task_type,
                    )
                    continue
                if model.name not in used:
                    used.append(model.name)
                schedule.extend(
                    TrialRequest(task=task, model=model, seed=seed, epochs=epochs) for seed in seeds
                )
        model_order = [m.name for m in models if m.name in used]
        return schedule, model_order

    # ------------------------------------------------------------------
    # Execution
    # ------------------------------------------------------------------

    def _materialize_data(self, schedule: List[TrialRequest]) -> Dict[Tuple[int, str, Optional[int]], Any]:
        data: Dict[Tuple[int, str, Optional[int]], Any] = {}
        for request in schedule:
            executor = self._executor_for(request.model)
            seed = request.seed if request.task.seed_aware_data else None
            key = (id(executor), request.task.name, seed)
            if key not in data:
                try:
                    data[key] = executor.load_data(request.task, seed)
                except TrialFailedError as exc:
                    raise exc.with_identity(*request.key)
                except Exception as exc:
                    raise TrialFailedError(
                        f"Data loading raised {type(exc).__name__}: {exc}",
                        task=request.task.name,
                        model=request.model.name,
                        seed=request.seed,
                    ) from exc
                self._log(
                    "DEBUG",
                    f"Data materialized for {request.task.name}",
                    event_type="DATA_MATERIALIZED",
                    task=request.task.name,
                    seed=seed,
                )
        return data

    async def _run_trial(
        self, request: TrialRequest, data: Any, semaphore: asyncio.Semaphore
    ) -> TrialOutcome:
        task, model, seed = request.key
        executor = self._executor_for(request.model)
        async with semaphore:
            streams = reseed_all(seed, task, model)
            if self.json_logger:
                self.json_logger.log_trial_event(
                    "TRIAL_STARTED", task, model, seed, level="DEBUG", epochs=request.epochs
                )
            start = time.perf_counter()
            try:
                outcome = await executor.execute(request, data, streams)
            except TrialFailedError as exc:
                self._log_failure(exc.with_identity(task, model, seed))
                raise
            except asyncio.CancelledError:
                raise
            except ValidationError as exc:
                failure = TrialSchemaError(
                    f"Trial result is not a valid outcome: {exc.errors()[0]['msg']}",
                    task=task,
                    model=model,
                    seed=seed,
                )
                self._log_failure(failure)
                raise failure from exc
            except Exception as exc:
                failure = TrialFailedError(
                    f"Trial raised {type(exc).__name__}: {exc}", task=task, model=model, seed=seed
                )
                self._log_failure(failure)
                raise failure from exc
        wall_time = outcome.wall_time_sec or (time.perf_counter() - start)
        if self.json_logger:
            self.json_logger.log_trial_event(
                "TRIAL_COMPLETED",
                task,
                model,
                seed,
                level="DEBUG",
                final_metric=outcome.final_metric,
                wall_time_sec=round(wall_time, 6),
            )
        return outcome

    async def _execute(
        self, schedule: List[TrialRequest], data: Dict[Tuple[int, str, Optional[int]], Any]
    ) -> Dict[Tuple[str, str, int], TrialOutcome]:
        semaphore = asyncio.Semaphore(self.parallelism)
        jobs: Dict[asyncio.Task, TrialRequest] = {}
        for request in schedule:
            executor = self._executor_for(request.model)
            seed = request.seed if request.task.seed_aware_data else None
            payload = data[(id(executor), request.task.name, seed)]
            jobs[asyncio.create_task(self._run_trial(request, payload, semaphore))] = request

        done, pending = await asyncio.wait(jobs, return_when=asyncio.FIRST_EXCEPTION)
        failures = [t for t in done if not t.cancelled() and t.exception() is not None]
        if failures:
            for job in pending:
                job.cancel()
            await asyncio.gather(*pending, return_exceptions=True)
            order = {id(r): i for i, r in enumerate(schedule)}
            first = min(failures, key=lambda t: order[id(jobs[t])])
            raise first.exception()

        return {jobs[t].key: t.result() for t in done}

    async def run_async(self, config: RunConfig) -> BenchmarkReport:
        """Execute the run and build its report (cached when config.cache_path is set)."""
        run_started = time.perf_counter()
        self._log("INFO", f"Run {config.run_id} started", event_type="RUN_STARTED", run_id=config.run_id)

        with self.registry.running():
            tasks = self.resolve_tasks(config)
            models = self.resolve_models(config)
            schedule, model_order = self.build_schedule(config, tasks, models)
            skipped = len(tasks) * len(models) - len({(r.task.name, r.model.name) for r in schedule})
            self._log(
                "INFO",
                f"Resolved {len(tasks)} tasks, {len(model_order)} models, {len(schedule)} trials",
                event_type="TASKS_RESOLVED",
                tasks=[t.name for t in tasks],
                models=model_order,
                seeds=sorted(config.seeds),
                trials=len(schedule),
                skipped_pairs=skipped,
            )
            if not schedule:
                raise EmptySelectionError(
                    "No compatible (task, model) pair: nothing to benchmark",
                    details={"tasks": [t.name for t in tasks], "models": [m.name for m in models]},
                )

            try:
                data = self._materialize_data(schedule)
                outcomes = await self._execute(schedule, data)
            except TrialFailedError as exc:
                self._log(
                    "ERROR",
                    f"Run {config.run_id} aborted: {exc}",
                    event_type="RUN_ABORTED",
                    error_code=exc.error_code,
                    task=exc.task,
                    model=exc.model,
                    seed=exc.seed,
                    stderr=exc.stderr,
                )
                raise

        tensor = self._merge(tasks, model_order, sorted(config.seeds), schedule, outcomes)
        report = build_report(tensor, config.report_config(), run_config_hash(config))
        self._log(
            "INFO",
            f"Report built for run {config.run_id}",
            event_type="REPORT_BUILT",
            tensor_hash=report.provenance.tensor_hash,
            cd=report.cd.cd if report.cd else None,
        )
        if config.cache_path:
            path = cache_save(report, config.cache_path)
            self._log("INFO", f"Report cached at {path}", event_type="CACHE_SAVED", path=str(path))
        self._log(
            "INFO",
            f"Run {config.run_id} completed",
            event_type="RUN_COMPLETED",
            trials=len(schedule),
            elapsed_sec=round(time.perf_counter() - run_started, 3),
        )
        return report

    @staticmethod
    def _merge(
        tasks: List[TaskSpec],
        models: List[str],
        seeds: List[int],
        schedule: List[TrialRequest],
        outcomes: Dict[Tuple[str, str, int], TrialOutcome],
    ) -> MetricTensor:
        cells: List[Cell] = []
        series: List[EpochSeries] = []
        for request in schedule:
            task, model, seed = request.key
            outcome = outcomes[request.key]
            cells.append(Cell(task=task, model=model, seed=seed, value=outcome.final_metric))
            if outcome.per_epoch:
                series.append(EpochSeries(task=task, model=model, seed=seed, values=outcome.per_epoch))
        return MetricTensor(
            tasks=tuple(tasks),
            models=tuple(models),
            seeds=tuple(seeds),
            cells=tuple(cells),
            per_epoch=tuple(series),
        )

    def _log(self, level: str, message: str, event_type: str, **fields) -> None:
        logger.log(getattr(logging, level), message, extra={"event_type": event_type})
        if self.json_logger:
            self.json_logger.log(level, message, event_type=event_type, **fields)

    def _log_failure(self, exc: TrialFailedError) -> None:
        if self.json_logger:
            self.json_logger.log_trial_event(
                "TRIAL_FAILED",
                exc.task,
                exc.model,
                exc.seed,
                level="ERROR",
                error_code=exc.error_code,
                error=exc.message,
            )


# ============================================================================
# ENTRY POINTS
# ============================================================================


async def run_benchmark_async(
    config: RunConfig,
    registry: Registry,
    executor: ExecutorArg,
    parallelism: Optional[int] = None,
    json_logger: Optional[JsonLogger] = None,
) -> BenchmarkReport:
    """Async form of run_benchmark for callers that already own an event loop."""
    degree = parallelism or config.executor.parallelism or 1
    runner = BenchmarkRunner(registry, executor, parallelism=degree, json_logger=json_logger)
    return await runner.run_async(config)


def run_benchmark(
    config: RunConfig,
    registry: Registry,
    executor: ExecutorArg,
    parallelism: Optional[int] = None,
    json_logger: Optional[JsonLogger] = None,
) -> BenchmarkReport:
    """
    Run a benchmark and return its report.

    Raises:
        TrialFailedError: If any scheduled trial fails (run aborted, no report)
        EmptySelectionError: If nothing is left to benchmark
    """
    return asyncio.run(
        run_benchmark_async(config, registry, executor, parallelism=parallelism, json_logger=json_logger)
    )
