"""
Data persistence layer using file-based JSON storage.

This module provides repository classes for derived artifacts (not static configuration):
- ReportCacheRepository: versioned, checksummed BenchmarkReport cache
- CalibrationRepository: Monte-Carlo calibration results

All repositories use the atomic write pattern (temp file + rename). Files contain no
timestamps, so equal inputs produce byte-identical files.

Cache file layout:
    {
      "schema_version": 1,
      "kind": "benchmark_report",
      "checksum": sha256(canonical_json(payload)),
      "payload": {config, tensor, cells, pairwise, cd, provenance}
    }
"""

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, ValidationError

from .models import decode_tensor, encode_tensor
from .protocol import CacheCorruptionError, CacheVersionError, TensorValidationError
from .report import BenchmarkReport
from .utils import canonical_json, sha256_hex

__all__ = [
    "CACHE_SCHEMA_VERSION",
    "CACHE_KIND",
    "DATA_ROOT",
    "atomic_write",
    "ReportCacheRepository",
    "CalibrationRepository",
    "cache_save",
    "cache_load",
]

CACHE_SCHEMA_VERSION = 1
CACHE_KIND = "benchmark_report"

# Default data root directory
DATA_ROOT = Path("SHARED/data")


def atomic_write(file_path: str | Path, data: dict) -> None:
    """
    Atomically write JSON data to file using temp file + rename pattern.

    Args:
        file_path: Target file path
        data: Data to write as JSON

    Raises:
        OSError: If write fails
    """
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)

    fd, temp_path = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False, allow_nan=False)
            f.write("\n")
        os.replace(temp_path, path)
    except Exception:
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise


# ============================================================================
# REPORT CACHE
# ============================================================================


def _report_payload(report: BenchmarkReport) -> Dict[str, Any]:
    dumped = report.model_dump(mode="json")
    return {
        "config": dumped["config"],
        "tensor": encode_tensor(report.tensor),
        "cells": dumped["cells"],
        "pairwise": dumped["pairwise"],
        "cd": dumped["cd"],
        "provenance": dumped["provenance"],
    }


class ReportCacheRepository:
    """
    Repository for one cached BenchmarkReport.

    Loading never re-runs trials: every table and figure is regenerated from the cached
    tensor and statistics.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def save(self, report: BenchmarkReport) -> Path:
        payload = _report_payload(report)
        envelope = {
            "schema_version": CACHE_SCHEMA_VERSION,
            "kind": CACHE_KIND,
            "checksum": sha256_hex(canonical_json(payload)),
            "payload": payload,
        }
        atomic_write(self.path, envelope)
        return self.path

    def load(self) -> BenchmarkReport:
        """
        Load and verify the cached report.

        Raises:
            FileNotFoundError: If the cache file does not exist
            CacheVersionError: If kind or schema_version does not match
            CacheCorruptionError: If the file is truncated, unparsable or fails its checksum
        """
        if not self.path.exists():
            raise FileNotFoundError(f"Report cache not found: {self.path}")
        try:
            envelope = json.loads(self.path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise CacheCorruptionError(
                f"Report cache is not valid JSON: {self.path}", details={"path": str(self.path)}
            ) from exc
        if not isinstance(envelope, dict):
            raise CacheCorruptionError(f"Report cache is not a JSON object: {self.path}")

        version = envelope.get("schema_version")
        kind = envelope.get("kind")
        if kind != CACHE_KIND or version != CACHE_SCHEMA_VERSION:
            raise CacheVersionError(
                f"Unsupported cache (kind={kind!r}, schema_version={version!r}); "
                f"expected kind={CACHE_KIND!r}, schema_version={CACHE_SCHEMA_VERSION}",
                details={"path": str(self.path), "kind": kind, "schema_version": version},
            )

        payload = envelope.get("payload")
        if not isinstance(payload, dict):
            raise CacheCorruptionError(f"Report cache has no payload: {self.path}")
        checksum = sha256_hex(canonical_json(payload))
        if checksum != envelope.get("checksum"):
            raise CacheCorruptionError(
                f"Report cache checksum mismatch: {self.path}",
                details={"path": str(self.path), "expected": envelope.get("checksum"), "actual": checksum},
            )

        try:
            tensor = decode_tensor(payload["tensor"])
            return BenchmarkReport.model_validate({**payload, "tensor": tensor})
        except (KeyError, ValidationError, TensorValidationError) as exc:
            raise CacheCorruptionError(
                f"Report cache payload is malformed: {exc}", details={"path": str(self.path)}
            ) from exc


def cache_save(report: BenchmarkReport, path: str | Path) -> Path:
    """Persist a report atomically; returns the written path."""
    return ReportCacheRepository(path).save(report)


def cache_load(path: str | Path) -> BenchmarkReport:
    """Load a report cache written by cache_save()."""
    return ReportCacheRepository(path).load()


# ============================================================================
# CALIBRATION RESULTS
# ============================================================================


class CalibrationRepository:
    """
    Repository for calibration results.

    File location: SHARED/data/calibration/<name>.json
    """

    def __init__(self, name: str = "calibration", data_root: Path = DATA_ROOT):
        self.path = Path(data_root) / "calibration" / f"{name}.json"

    def save(self, result: BaseModel | Dict[str, Any]) -> Path:
        data = result.model_dump(mode="json") if isinstance(result, BaseModel) else dict(result)
        atomic_write(self.path, data)
        return self.path

    def load(self) -> Optional[Dict[str, Any]]:
        if not self.path.exists():
            return None
        return json.loads(self.path.read_text(encoding="utf-8"))
