"""
Configuration file loading and validation.

This module provides functions to load and validate configuration files:
- load_system_config(): Global settings (with env overrides)
- load_registry_config(): Task/model catalog
- load_run_config(): One benchmark run
"""

import json
import os
from pathlib import Path
from typing import Type, TypeVar

from pydantic import BaseModel, ValidationError

try:
    from .config_models import RegistryConfig, RunConfig, SystemConfig
    from .protocol import ConfigError
except ImportError:
    from config_models import RegistryConfig, RunConfig, SystemConfig
    from protocol import ConfigError

__all__ = [
    "DEFAULT_SYSTEM_CONFIG_PATH",
    "load_json_file",
    "validate_config",
    "apply_env_overrides",
    "load_system_config",
    "load_registry_config",
    "load_run_config",
]

T = TypeVar("T", bound=BaseModel)

DEFAULT_SYSTEM_CONFIG_PATH = Path("SHARED/config/system.json")


def load_json_file(file_path: str | Path) -> dict:
    """
    Load and parse JSON file.

    Args:
        file_path: Path to JSON file

    Returns:
        Parsed JSON data as dictionary

    Raises:
        FileNotFoundError: If file does not exist
        ConfigError: If file is not valid JSON
    """
    path = Path(file_path)
    if not path.exists():
        raise FileNotFoundError(f"Configuration file not found: {file_path}")

    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"Invalid JSON in {file_path}: {exc.msg} (line {exc.lineno})",
                details={"path": str(file_path)},
            ) from exc


def validate_config(data: dict, model: Type[T]) -> T:
    """
    Validate configuration data against Pydantic model.

    Raises:
        ConfigError: If data does not match schema (wraps the pydantic ValidationError)
    """
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        errors = [
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
        ]
        raise ConfigError(
            f"Invalid {model.__name__}: {'; '.join(errors)}",
            details={"model": model.__name__, "errors": errors},
        ) from exc


def _get_env_int(key: str, default: int) -> int:
    try:
        return int(os.getenv(key, default))
    except (TypeError, ValueError):
        return default


def _get_env_float(key: str, default: float) -> float:
    try:
        return float(os.getenv(key, default))
    except (TypeError, ValueError):
        return default


def apply_env_overrides(system_config: dict) -> dict:
    """
    Apply environment variable overrides to system configuration.

    Environment variables are optional; if unset (or malformed numbers), JSON values remain.
    """
    cfg = dict(system_config)
    runner = dict(cfg.get("runner", {}))
    cache = dict(cfg.get("cache", {}))
    logging_cfg = dict(cfg.get("logging", {}))

    # Runner
    runner["parallelism"] = _get_env_int("BENCH_PARALLELISM", runner.get("parallelism", 1))
    runner["trial_timeout_sec"] = _get_env_float(
        "BENCH_TRIAL_TIMEOUT_SEC", runner.get("trial_timeout_sec", 3600.0)
    )
    registry_path = os.getenv("BENCH_REGISTRY_PATH")
    if registry_path:
        runner["registry_path"] = registry_path
    cfg["runner"] = runner

    # Cache
    cache_dir = os.getenv("BENCH_CACHE_DIR")
    if cache_dir:
        cache["cache_dir"] = cache_dir
    cfg["cache"] = cache

    # Logging
    logging_cfg["level"] = os.getenv("LOG_LEVEL", logging_cfg.get("level", "INFO")).upper()
    log_root = os.getenv("BENCH_LOG_ROOT")
    if log_root:
        logging_cfg["log_root"] = log_root
    cfg["logging"] = logging_cfg

    return cfg


def load_system_config(file_path: str | Path | None = None) -> SystemConfig:
    """
    Load and validate system configuration with environment overrides.

    A missing default file yields model defaults (still env-overridden); a missing
    explicit path raises FileNotFoundError.
    """
    path = Path(file_path) if file_path else DEFAULT_SYSTEM_CONFIG_PATH
    if file_path is None and not path.exists():
        data: dict = {}
    else:
        data = load_json_file(path)
    data = apply_env_overrides(data)
    return validate_config(data, SystemConfig)


def load_registry_config(file_path: str | Path) -> RegistryConfig:
    """Load and validate the task/model catalog."""
    data = load_json_file(file_path)
    return validate_config(data, RegistryConfig)


def load_run_config(file_path: str | Path) -> RunConfig:
    """Load and validate one run configuration."""
    data = load_json_file(file_path)
    return validate_config(data, RunConfig)
