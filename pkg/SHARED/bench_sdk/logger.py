"""
Structured JSON Lines logging for runs, the CLI and calibration.

- JsonLogger: event log of one component, under <log_root>/runs/<run_id>/ for a run
  and <log_root>/system/ otherwise
- setup_logger(): rotating JSONL handler for a stdlib logger hierarchy (the harness
  modules log through logging.getLogger(__name__))

Log entries carry wall-clock timestamps; reports and caches never do.
"""

import json
import logging
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional

__all__ = ["LOG_ROOT", "JsonLogger", "JSONFormatter", "setup_logger"]

LOG_ROOT = Path("SHARED/logs")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds").replace("+00:00", "Z")


class JsonLogger:
    """
    Append-only JSONL event log of one component.

    Usage:
        logger = JsonLogger(component="runner", run_id="cross_category_demo")
        logger.info("Schedule built", event_type="TASKS_RESOLVED", trials=420)
        logger.log_trial_event("TRIAL_COMPLETED", "Cora", "GCN", 3, final_metric=0.81)
    """

    LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]

    def __init__(
        self,
        component: str,
        run_id: Optional[str] = None,
        min_level: str = "INFO",
        log_root: Optional[Path] = None,
    ):
        self.component = component
        self.run_id = run_id
        self.min_level = self.LEVELS.index(min_level.upper())

        root = Path(log_root) if log_root else LOG_ROOT
        subdir = root / "runs" / run_id if run_id else root / "system"
        subdir.mkdir(parents=True, exist_ok=True)
        self.log_file = subdir / f"{component}.log.jsonl"

    def log(
        self,
        level: str,
        message: str,
        event_type: Optional[str] = None,
        data: Optional[Dict[str, Any]] = None,
        **extra_fields,
    ) -> None:
        """Append one entry; entries below min_level are dropped."""
        if self.LEVELS.index(level) < self.min_level:
            return

        entry: Dict[str, Any] = {
            "timestamp": _utc_now(),
            "level": level,
            "component": self.component,
            "message": message,
        }
        if self.run_id:
            entry["run_id"] = self.run_id
        if event_type:
            entry["event_type"] = event_type
        if data:
            entry["data"] = data
        entry.update(extra_fields)

        with self.log_file.open("a", encoding="utf-8") as f:
            f.write(json.dumps(entry, ensure_ascii=False, default=str) + "\n")

    def debug(self, message: str, event_type: Optional[str] = None, **kwargs) -> None:
        self.log("DEBUG", message, event_type=event_type, **kwargs)

    def info(self, message: str, event_type: Optional[str] = None, **kwargs) -> None:
        self.log("INFO", message, event_type=event_type, **kwargs)

    def warning(self, message: str, event_type: Optional[str] = None, **kwargs) -> None:
        self.log("WARNING", message, event_type=event_type, **kwargs)

    def error(self, message: str, event_type: Optional[str] = None, **kwargs) -> None:
        self.log("ERROR", message, event_type=event_type, **kwargs)

    def log_trial_event(
        self, event_type: str, task: str, model: str, seed: int, level: str = "INFO", **details
    ) -> None:
        """
        Log a trial lifecycle event keyed by its (task, model, seed) identity.

        The runner emits TRIAL_STARTED and TRIAL_COMPLETED at DEBUG and TRIAL_FAILED
        at ERROR; details carry final_metric, wall_time_sec or error_code.
        """
        self.log(
            level,
            f"{event_type} {task}/{model}/seed={seed}",
            event_type=event_type,
            task=task,
            model=model,
            seed=seed,
            **details,
        )

    def log_error_event(
        self, error_code: str, error_message: str, details: Optional[Dict[str, Any]] = None, **fields
    ) -> None:
        """Log an ERROR_OCCURRED entry for an error code (B001-B015) and its details."""
        self.error(
            f"Error {error_code}: {error_message}",
            event_type="ERROR_OCCURRED",
            data=details,
            error_code=error_code,
            **fields,
        )


class JSONFormatter(logging.Formatter):
    """Render LogRecords as JSON lines; extra= fields become top-level keys."""

    _RESERVED = set(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {"message", "taskName"}

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": _utc_now(),
            "component": record.name,
            "level": record.levelname,
            "message": record.getMessage(),
        }
        for key, value in record.__dict__.items():
            if key not in self._RESERVED and not key.startswith("_"):
                entry[key] = value
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, ensure_ascii=False, default=str)


def setup_logger(
    name: str,
    log_file: str | Path,
    level: int = logging.INFO,
    max_bytes: int = 100 * 1024 * 1024,
    backup_count: int = 5,
) -> logging.Logger:
    """
    Attach a rotating JSONL handler to the logger `name` (and so to its children).

    Calling twice for the same logger and file does not stack handlers; a rotating handler
    pointing at another file is closed and replaced.
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.propagate = False

    log_path = Path(log_file)
    log_path.parent.mkdir(parents=True, exist_ok=True)
    for existing in list(logger.handlers):
        if not isinstance(existing, RotatingFileHandler):
            continue
        if Path(existing.baseFilename) == log_path.resolve():
            return logger
        logger.removeHandler(existing)
        existing.close()

    handler = RotatingFileHandler(log_path, maxBytes=max_bytes, backupCount=backup_count, encoding="utf-8")
    handler.setLevel(level)
    handler.setFormatter(JSONFormatter())
    logger.addHandler(handler)
    return logger
