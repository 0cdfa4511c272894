"""
Experiment configuration and report schemas
"""

from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class ExperimentName(str, Enum):
    """Experiments reachable from the CLI and the HTTP API"""
    NO_DENSE_CONJUGACY = "no-dense-conjugacy"
    DENSE_CONJUGACY = "dense-conjugacy"
    STEINHAUS = "steinhaus"
    COMPACTIFICATION = "compactification"
    DECOMPOSITIONS = "decompositions"
    WEAK_CONTINUITY = "weak-continuity"


class ToleranceOverrides(BaseModel):
    """Per-run overrides of the invariant-check tolerances"""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    abs_tol: Optional[float] = Field(None, alias="abs", gt=0)
    rel_tol: Optional[float] = Field(None, alias="rel", ge=0)


class ExperimentConfig(BaseModel):
    """Experiment configuration; unknown keys are rejected"""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(0, ge=0, le=2**64 - 1)
    dims: int = Field(4, ge=1, le=2**32 - 1, description="Working support size")
    trials: int = Field(10, ge=1)
    epsilon: float = Field(0.05, gt=0)
    t: float = Field(1.0, description="Translation length of the transvection")
    k: int = Field(3, ge=1, description="Number of probe points")
    resolutions: List[float] = Field(
        default_factory=lambda: [0.01, 0.005],
        description="Search resolutions, coarse to fine",
    )
    block_dims: int = Field(2, ge=2, description="Dimension of each block of the dense rotation")
    tolerances: Optional[ToleranceOverrides] = None

    @field_validator("resolutions")
    @classmethod
    def check_resolutions(cls, value: List[float]) -> List[float]:
        if not value or any(h <= 0 or h >= 1 for h in value):
            raise ValueError("resolutions must be a non-empty list of values in (0, 1)")
        return value

    @field_validator("block_dims")
    @classmethod
    def check_block_dims(cls, value: int) -> int:
        if value % 2:
            raise ValueError("block_dims must be even")
        return value


class TrialRecord(BaseModel):
    """Outcome of one trial"""

    model_config = ConfigDict(populate_by_name=True)

    trial: int
    inputs_digest: str
    defect: Optional[float] = None
    bound: float
    passed: bool = Field(..., alias="pass")
    excluded: bool = False
    reason: Optional[str] = None
    details: Dict[str, float] = Field(default_factory=dict)


class Aggregate(BaseModel):
    """Aggregate over the trials that were not excluded"""

    model_config = ConfigDict(populate_by_name=True)

    max_defect: Optional[float] = None
    passed: bool = Field(..., alias="pass")
    wall_ms: float
    excluded: int = 0


class ExperimentReport(BaseModel):
    """Report of one experiment run"""

    experiment: ExperimentName
    config_digest: str
    trials: List[TrialRecord]
    aggregate: Aggregate
    digest: str = ""
