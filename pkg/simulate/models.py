"""Data models for simulated panels with known treatment effects."""

from enum import Enum
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

import config


class AdoptionDesign(str, Enum):
    """Named adoption schedules."""
    PURE_PLACEBO_STRATUM = "pure-placebo-stratum"
    CROSS_STRATUM_STAGGERED = "cross-stratum-staggered"
    WITHIN_STRATUM_STAGGERED = "within-stratum-staggered"


class EffectLaw(str, Enum):
    """How the treatment effect depends on (r, g, t)."""
    CONSTANT = "constant"
    EVENT_TIME_LINEAR = "event-time-linear"
    TABLE = "table"


class ViolationLaw(str, Enum):
    """Departure from parallel trends among eventual adopters."""
    NONE = "none"
    COMMON = "stratum-common"  # same in every stratum; cancelled by a placebo stratum
    STRATUM_SPECIFIC = "stratum-specific"


class TrendModel(str, Enum):
    """Shape of the unit-by-time component of untreated outcomes."""
    ADDITIVE = "additive"  # phi_s + psi_t
    UNIT_TIME = "unit-time"  # unrestricted b_st


class NoiseModel(str, Enum):
    IID = "iid"
    TWO_WAY = "two-way"  # shared (s, t) and (r, t) shocks


class EffectEntry(BaseModel):
    """One user-supplied effect for cohort g in stratum r at time t."""
    r: int
    g: int
    t: int
    att: float


class DGPConfig(BaseModel):
    """Simulation settings.

    Units, strata and periods are labelled 1..S, 1..R and 1..T. ``adoption``,
    when given, holds one initiation period per (s, r) (None for never) and
    takes precedence over ``design``.
    """
    S: int = Field(default=4, ge=2)
    R: int = Field(default=3, ge=2)
    T: int = Field(default=6, ge=2)
    design: AdoptionDesign = AdoptionDesign.CROSS_STRATUM_STAGGERED
    adoption: Optional[list[list[Optional[int]]]] = None
    first_adoption: int = Field(default=config.DEFAULT_FIRST_ADOPTION, ge=2)
    adoption_step: int = Field(default=1, ge=0)

    effect: EffectLaw = EffectLaw.CONSTANT
    effect_constant: float = 1.0
    effect_slope: float = 0.0
    stratum_gradient: float = 0.0  # added per stratum index, giving stratum-specific effects
    effect_table: list[EffectEntry] = Field(default_factory=list)

    violation: ViolationLaw = ViolationLaw.NONE
    violation_magnitude: float = config.DEFAULT_VIOLATION_MAGNITUDE

    trend: TrendModel = TrendModel.ADDITIVE

    noise: NoiseModel = NoiseModel.IID
    sigma: float = Field(default=0.0, ge=0)
    seed: int = Field(default=config.DEFAULT_SEED, ge=0)


class TruthTable(BaseModel):
    """True group-time effects of a simulated panel.

    ``att`` maps (r, g, t) to ATT_r(g, t) for every treated cohort and every
    period, zero before g. ``cell_effect`` is the per-cell effect (zero on
    untreated cells) and ``violation`` the injected trend departure.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    att: dict[tuple[int, int, int], float]
    cell_effect: np.ndarray
    violation: np.ndarray
    uniform_att: Optional[float] = None

    def __getitem__(self, key: tuple[int, int, int]) -> float:
        return self.att[key]

    def to_frame(self) -> pd.DataFrame:
        rows = [{"r": r, "g": g, "t": t, "att": v} for (r, g, t), v in sorted(self.att.items())]
        return pd.DataFrame(rows, columns=["r", "g", "t", "att"])
