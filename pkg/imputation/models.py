"""Data models for imputed treatment effects and event-study curves."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field


class DropReason(str, Enum):
    """Why a treated cell has no imputed counterfactual."""
    UNANCHORED_PREDICTION = "UnanchoredPrediction"


class PlaceboScope(str, Enum):
    """Which pseudo-treated cells a placebo lag averages over."""
    WINDOW = "window"  # every period from g - k up to g - 1
    LAG_PERIOD = "lag-period"  # only period g - k


class CellEffect(BaseModel):
    """Observed minus imputed untreated outcome for one treated cell."""
    s: int
    r: int
    t: int
    g: int
    y: float
    y0: float
    effect: float
    event_time: int = Field(ge=0)


class DroppedCell(BaseModel):
    """A treated cell left out of every average."""
    s: int
    r: int
    t: int
    reason: DropReason = DropReason.UNANCHORED_PREDICTION


class ImputationResult(BaseModel):
    """All imputed cell effects plus the cells that could not be imputed."""
    effects: list[CellEffect]
    dropped: list[DroppedCell] = Field(default_factory=list)
    iterations: int = 0


class PlaceboResult(BaseModel):
    """Held-out placebo estimate at one lag."""
    lag: int = Field(ge=1)
    estimate: Optional[float] = None
    n: int = 0
    dropped: int = 0


class EventStudyPoint(BaseModel):
    """One event time; negative k are placebo lags, n == 0 flags an empty point."""
    k: int
    estimate: Optional[float] = None
    n: int = 0
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None

    @property
    def is_placebo(self) -> bool:
        return self.k < 0


class EventStudyCurve(BaseModel):
    """Event-study estimates ordered by event time."""
    points: list[EventStudyPoint]

    def point(self, k: int) -> EventStudyPoint:
        for p in self.points:
            if p.k == k:
                return p
        raise KeyError(k)
