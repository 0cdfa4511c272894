"""
Models package for lorentz-lab
"""

from .experiment import (
    Aggregate,
    ExperimentConfig,
    ExperimentName,
    ExperimentReport,
    ToleranceOverrides,
    TrialRecord,
)

__all__ = [
    "Aggregate",
    "ExperimentConfig",
    "ExperimentName",
    "ExperimentReport",
    "ToleranceOverrides",
    "TrialRecord",
]
