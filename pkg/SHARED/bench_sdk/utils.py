"""
Utility functions for common operations.

This module provides helper functions for:
- Stable 64-bit name hashing (FNV-1a) used for RNG key derivation
- Canonical JSON and content hashes used by caches and provenance
- Fixed-precision formatting of metrics, deltas and p-values
- LaTeX escaping of free-text names
"""

import hashlib
import json
from typing import Any, Optional

__all__ = [
    "FNV1A_64_OFFSET_BASIS",
    "FNV1A_64_PRIME",
    "fnv1a_64",
    "canonical_json",
    "sha256_hex",
    "format_metric",
    "format_cell",
    "format_delta",
    "format_pvalue",
    "latex_escape",
]

FNV1A_64_OFFSET_BASIS = 0xCBF29CE484222325
FNV1A_64_PRIME = 0x100000001B3
_MASK_64 = 0xFFFFFFFFFFFFFFFF

NA_TEXT = "n/a"


def fnv1a_64(text: str) -> int:
    """
    Hash text with 64-bit FNV-1a over its UTF-8 bytes.

    Returns the same value on every platform and interpreter run, unlike hash().

    Example:
        >>> hex(fnv1a_64("a"))
        '0xaf63dc4c8601ec8c'
    """
    h = FNV1A_64_OFFSET_BASIS
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * FNV1A_64_PRIME) & _MASK_64
    return h


def canonical_json(data: Any) -> str:
    """Serialize data as sorted-key compact JSON (the form hashes are taken over)."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def format_metric(value: float, precision: int = 3) -> str:
    """Format a metric value at fixed precision ("0.811")."""
    return f"{value:.{precision}f}"


def format_cell(mean: Optional[float], halfwidth: Optional[float], precision: int = 3) -> str:
    """
    Format a (mean, half-width) cell in plain text.

    Example:
        >>> format_cell(0.811, 0.001)
        '0.811±0.001'
        >>> format_cell(None, None)
        'n/a'
    """
    if mean is None or halfwidth is None:
        return NA_TEXT
    return f"{format_metric(mean, precision)}±{format_metric(halfwidth, precision)}"


def format_delta(delta: float, precision: int = 3) -> str:
    """Format a signed mean difference ("+0.017")."""
    return f"{delta:+.{precision}f}"


def format_pvalue(p: Optional[float]) -> str:
    """
    Format a p-value with three significant digits.

    Small values switch to exponent form the way Python's general format does.

    Example:
        >>> format_pvalue(0.01171875)
        '0.0117'
        >>> format_pvalue(3.58e-05)
        '3.58e-05'
    """
    if p is None:
        return NA_TEXT
    return format(p, ".3g")


_LATEX_SPECIALS = {
    "\\": r"\textbackslash{}",
    "&": r"\&",
    "%": r"\%",
    "$": r"\$",
    "#": r"\#",
    "_": r"\_",
    "{": r"\{",
    "}": r"\}",
    "~": r"\textasciitilde{}",
    "^": r"\textasciicircum{}",
}


def latex_escape(text: str) -> str:
    """Escape LaTeX special characters in a free-text name."""
    return "".join(_LATEX_SPECIALS.get(ch, ch) for ch in text)
