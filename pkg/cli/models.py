"""Data models for command-line runs."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

import config
from identification import ComparisonSet, TStarRule, Weighting
from imputation import PlaceboScope
from inference import BootstrapConfig, BootstrapScheme, ClusterKey
from simulate import AdoptionDesign


class Subcommand(str, Enum):
    ESTIMATE = "estimate"
    DECOMPOSE = "decompose"
    EVENT_STUDY = "event-study"
    SIMULATE = "simulate"


class BootstrapMode(str, Enum):
    """Bootstrap choice on the command line."""
    NONE = "none"
    CLUSTER = "cluster"
    PIGEONHOLE = "pigeonhole"
    BOTH = "both"  # one-way and pigeonhole side by side (estimate only)


class CellWeighting(str, Enum):
    """Per-cell regression weights for estimate."""
    UNIFORM = "uniform"
    N_SR = "n-sr"  # number of units behind each (s, r) series


class RunConfig(BaseModel):
    """Fully resolved options of one run; echoed to run.json."""
    subcommand: Subcommand
    input: Optional[str] = None
    out: str = "."
    seed: int = Field(default=config.DEFAULT_SEED, ge=0)
    threads: int = Field(default=config.DEFAULT_THREADS, ge=1)

    # Bootstrap
    bootstrap: BootstrapMode = BootstrapMode.NONE
    draws: int = Field(default=config.DEFAULT_DRAWS, ge=2)
    cluster_key: ClusterKey = ClusterKey.PAIR

    # Estimators
    comparison: ComparisonSet = ComparisonSet.NOT_YET_TREATED
    t_star: TStarRule = TStarRule.LAST_PRE
    weighting: Weighting = Weighting.UNIFORM
    cell_weights: CellWeighting = CellWeighting.UNIFORM

    # Decomposition
    term_dump: bool = False
    tuple_cap: int = Field(default=config.TUPLE_CAP, ge=1)

    # Event study
    max_pre: int = Field(default=0, ge=0)
    max_post: int = Field(default=0, ge=0)
    placebo_scope: PlaceboScope = PlaceboScope.WINDOW

    # Simulation
    design: Optional[AdoptionDesign] = None
    dgp_config: Optional[str] = None

    # Plots
    adoption_plot: bool = False

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if self.subcommand != Subcommand.SIMULATE and not self.input:
            raise ValueError(f"{self.subcommand.value} needs --input")
        if self.term_dump and self.subcommand != Subcommand.DECOMPOSE:
            raise ValueError("--term-dump only applies to decompose")
        if self.bootstrap == BootstrapMode.BOTH and self.subcommand != Subcommand.ESTIMATE:
            raise ValueError("--bootstrap both only applies to estimate")
        if self.cell_weights != CellWeighting.UNIFORM and self.subcommand != Subcommand.ESTIMATE:
            raise ValueError("--cell-weights only applies to estimate")
        return self

    def bootstrap_configs(self) -> list[BootstrapConfig]:
        """One configuration per requested scheme, one-way first."""
        schemes = {
            BootstrapMode.NONE: [],
            BootstrapMode.CLUSTER: [BootstrapScheme.ONE_WAY_CLUSTER],
            BootstrapMode.PIGEONHOLE: [BootstrapScheme.PIGEONHOLE_TWO_WAY],
            BootstrapMode.BOTH: [BootstrapScheme.ONE_WAY_CLUSTER, BootstrapScheme.PIGEONHOLE_TWO_WAY],
        }[self.bootstrap]
        return [
            BootstrapConfig(scheme=scheme, cluster_key=self.cluster_key, draws=self.draws, seed=self.seed)
            for scheme in schemes
        ]

    def bootstrap_config(self) -> Optional[BootstrapConfig]:
        configs = self.bootstrap_configs()
        return configs[0] if configs else None
