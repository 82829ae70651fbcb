"""Monte-Carlo calibration of FWER, clique coverage and power."""

from .montecarlo import (
    CalibrationResult,
    PowerCurve,
    estimate_clique_coverage,
    estimate_fwer,
    estimate_power,
    generate_null_tensor,
)

__all__ = [
    "CalibrationResult",
    "PowerCurve",
    "estimate_clique_coverage",
    "estimate_fwer",
    "estimate_power",
    "generate_null_tensor",
]
