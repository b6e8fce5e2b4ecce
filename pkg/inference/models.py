"""Data models for bootstrap inference."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field

import config


class BootstrapScheme(str, Enum):
    """Weight-drawing scheme."""
    ONE_WAY_CLUSTER = "one_way_cluster"
    PIGEONHOLE_TWO_WAY = "pigeonhole_two_way"


class ClusterKey(str, Enum):
    """Cluster definition for the one-way scheme."""
    PAIR = "pair"  # (s, r) series
    S = "s"
    R = "r"


class BootstrapConfig(BaseModel):
    """Bayesian bootstrap settings; (seed, draws, scheme) fix every draw."""
    scheme: BootstrapScheme = BootstrapScheme.ONE_WAY_CLUSTER
    cluster_key: ClusterKey = ClusterKey.PAIR
    draws: int = Field(default=config.DEFAULT_DRAWS, ge=2)
    seed: int = Field(default=config.DEFAULT_SEED, ge=0, lt=2 ** 64)


class BootstrapSummary(BaseModel):
    """Full-sample estimate with bootstrap spread and a normal interval."""
    estimate: float
    se: float = Field(ge=0)
    ci_lo: float
    ci_hi: float
    bootstrap_mean: Optional[float] = None
    draws: list[float] = Field(default_factory=list)
    b_requested: int
    b_failed: int = 0
    scheme: BootstrapScheme
    seed: int

    def to_report(self) -> dict:
        """JSON-ready summary without the per-draw estimates."""
        return self.model_dump(mode="json", exclude={"draws"})


class BootstrapBand(BaseModel):
    """Pointwise bootstrap summary for a vector of estimates (e.g. an event-study curve).

    Entries are None where the full-sample estimate is undefined.
    """
    estimate: list[Optional[float]]
    se: list[Optional[float]]
    ci_lo: list[Optional[float]]
    ci_hi: list[Optional[float]]
    b_requested: int
    b_failed: int = 0
    scheme: BootstrapScheme
    seed: int
