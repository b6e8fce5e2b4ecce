"""Data models for group-time treatment effects and their aggregation."""

import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class EstimatorTag(str, Enum):
    """Which estimator produced a group-time effect."""
    PROP1 = "prop1"
    PROP2 = "prop2"
    IMPUTATION = "imputation"


class ComparisonSet(str, Enum):
    """Cohorts pooled as the comparison group at evaluation time t."""
    NOT_YET_TREATED = "not-yet-treated"
    NEVER_TREATED = "never-treated"


class TStarRule(str, Enum):
    """Choice of base period(s) before initiation."""
    LAST_PRE = "last-pre"
    FULL_WINDOW = "full-window"


class Weighting(str, Enum):
    """Aggregation weights over effects."""
    UNIFORM = "uniform"
    COHORT_SIZE = "cohort-size"


class GroupTimeEffect(BaseModel):
    """Estimated ATT_r(g, t) for stratum r, initiation time g, evaluation time t.

    ``primary`` and ``placebo`` hold the two double differences behind a
    triple-difference estimate (``estimate = primary - placebo``).
    """
    r: int
    g: int
    t: int
    estimate: float
    n_treated: int = Field(ge=1)
    n_comparison: int = Field(ge=0)
    estimator: EstimatorTag
    comparison: list[int] = Field(default_factory=list)
    placebo_strata: list[int] = Field(default_factory=list)
    primary: Optional[float] = None
    placebo: Optional[float] = None

    @model_validator(mode="after")
    def _check_effect(self) -> "GroupTimeEffect":
        if self.t < self.g:
            raise ValueError(f"evaluation time {self.t} precedes initiation {self.g}")
        if not math.isfinite(self.estimate):
            raise ValueError("estimate must be finite")
        return self

    @property
    def key(self) -> tuple[int, int, int]:
        return self.r, self.g, self.t


class AggregationWeights(BaseModel):
    """Researcher-chosen weight per (r, g, t) effect."""
    weights: dict[tuple[int, int, int], float]

    @field_validator("weights")
    @classmethod
    def _nonnegative(cls, v: dict[tuple[int, int, int], float]) -> dict[tuple[int, int, int], float]:
        if any(w < 0 or not math.isfinite(w) for w in v.values()):
            raise ValueError("aggregation weights must be finite and nonnegative")
        return v
