"""
External-command trial executor.

The command template must contain {task}, {model}, {seed} and {epochs}. It is split with
shlex first and placeholders are substituted per argument, so names never need quoting.
The child additionally receives BENCH_TASK, BENCH_MODEL, BENCH_SEED and BENCH_EPOCHS.

stdout protocol: one JSON object {"final_metric": <real>, "per_epoch": [<real>, ...]?}.
Log lines before it are tolerated when the object is the last stdout line.
"""

import asyncio
import json
import os
import shlex
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from bench_sdk.config_models import COMMAND_PLACEHOLDERS, DEFAULT_TRIAL_TIMEOUT_SEC
from bench_sdk.models import TrialOutcome, TrialRequest
from bench_sdk.protocol import (
    InvalidArgumentError,
    TrialFailedError,
    TrialOutput,
    TrialSchemaError,
    TrialTimeoutError,
)
from harness.base.executor_base import TrialExecutor
from harness.runner.seeding import GeneratorBundle

__all__ = ["build_command", "parse_trial_stdout", "execute_trial_external", "ExternalCommandExecutor"]

# stderr kept on errors
_STDERR_TAIL = 4000


def build_command(template: str, request: TrialRequest) -> List[str]:
    """Split the template and substitute placeholders argument by argument."""
    missing = [p for p in COMMAND_PLACEHOLDERS if p not in template]
    if missing:
        raise InvalidArgumentError(
            f"Command template is missing placeholders: {missing}",
            details={"template": template, "missing": missing},
        )
    values = {
        "{task}": request.task.name,
        "{model}": request.model.name,
        "{seed}": str(request.seed),
        "{epochs}": str(request.epochs),
    }
    args = []
    for arg in shlex.split(template):
        for placeholder, value in values.items():
            arg = arg.replace(placeholder, value)
        args.append(arg)
    return args


def _decode_object(text: str, prefix: bool = False) -> Optional[Dict[str, Any]]:
    try:
        obj = json.JSONDecoder().raw_decode(text)[0] if prefix else json.loads(text)
    except json.JSONDecodeError:
        return None
    return obj if isinstance(obj, dict) else None


def parse_trial_stdout(stdout: str) -> TrialOutput:
    """
    Parse the trial's stdout into a TrialOutput.

    Tries the whole output, then its last non-empty line, then a JSON object at the start
    of the output followed by trailing text.

    Raises:
        TrialSchemaError: If no JSON object is found or it violates the protocol
    """
    text = stdout.strip()
    lines = [line for line in text.splitlines() if line.strip()]
    obj = _decode_object(text) if text else None
    if obj is None and lines:
        obj = _decode_object(lines[-1].strip())
    if obj is None and text:
        obj = _decode_object(text, prefix=True)
    if obj is None:
        raise TrialSchemaError(f"Trial stdout is not a JSON object: {text[:200]!r}")
    try:
        return TrialOutput.model_validate(obj)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
        )
        raise TrialSchemaError(f"Trial output violates the stdout protocol: {problems}") from exc


async def execute_trial_external(
    request: TrialRequest,
    command_template: str,
    timeout_sec: float = DEFAULT_TRIAL_TIMEOUT_SEC,
    cwd: Optional[str | Path] = None,
    env: Optional[Dict[str, str]] = None,
) -> TrialOutcome:
    """
    Run one trial as a child process.

    Raises:
        TrialFailedError: Spawn failure or nonzero exit (with captured stderr)
        TrialTimeoutError: The child exceeded timeout_sec and was killed
        TrialSchemaError: stdout does not follow the protocol
    """
    task, model, seed = request.key
    args = build_command(command_template, request)
    child_env = {
        **os.environ,
        **(env or {}),
        "BENCH_TASK": task,
        "BENCH_MODEL": model,
        "BENCH_SEED": str(seed),
        "BENCH_EPOCHS": str(request.epochs),
    }

    start = time.perf_counter()
    try:
        proc = await asyncio.create_subprocess_exec(
            *args,
            stdout=asyncio.subprocess.PIPE,
            stderr=asyncio.subprocess.PIPE,
            cwd=str(cwd) if cwd else None,
            env=child_env,
        )
    except OSError as exc:
        raise TrialFailedError(
            f"Could not spawn trial command {args[0]!r}: {exc}", task=task, model=model, seed=seed
        ) from exc

    try:
        stdout, stderr = await asyncio.wait_for(proc.communicate(), timeout=timeout_sec)
    except asyncio.TimeoutError:
        proc.kill()
        await proc.wait()
        raise TrialTimeoutError(
            f"Trial exceeded timeout of {timeout_sec:g}s", task=task, model=model, seed=seed
        )
    except asyncio.CancelledError:
        if proc.returncode is None:
            proc.kill()
            await proc.wait()
        raise

    stderr_text = stderr.decode("utf-8", errors="replace")[-_STDERR_TAIL:]
    if proc.returncode != 0:
        raise TrialFailedError(
            f"Trial command exited with status {proc.returncode}",
            task=task,
            model=model,
            seed=seed,
            stderr=stderr_text,
        )

    try:
        output = parse_trial_stdout(stdout.decode("utf-8", errors="replace"))
    except TrialSchemaError as exc:
        exc.stderr = stderr_text
        exc.details["stderr"] = stderr_text
        raise exc.with_identity(task, model, seed)

    return TrialOutcome(
        final_metric=output.final_metric,
        per_epoch=tuple(output.per_epoch) if output.per_epoch is not None else None,
        wall_time_sec=time.perf_counter() - start,
    )


class ExternalCommandExecutor(TrialExecutor):
    """Executor that shells out to a training command per trial."""

    name = "external"

    def __init__(
        self,
        command_template: str,
        timeout_sec: float = DEFAULT_TRIAL_TIMEOUT_SEC,
        cwd: Optional[str | Path] = None,
        env: Optional[Dict[str, str]] = None,
    ):
        missing = [p for p in COMMAND_PLACEHOLDERS if p not in command_template]
        if missing:
            raise InvalidArgumentError(
                f"Command template is missing placeholders: {missing}",
                details={"template": command_template, "missing": missing},
            )
        self.command_template = command_template
        self.timeout_sec = timeout_sec
        self.cwd = cwd
        self.env = env
        self.calls = 0

    async def execute(self, request: TrialRequest, data: Any, streams: GeneratorBundle) -> TrialOutcome:
        self.calls += 1
        return await execute_trial_external(
            request, self.command_template, timeout_sec=self.timeout_sec, cwd=self.cwd, env=self.env
        )
