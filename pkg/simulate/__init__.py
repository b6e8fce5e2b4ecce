"""Simulate module: panels with known group-time effects."""

from .models import (
    AdoptionDesign,
    DGPConfig,
    EffectEntry,
    EffectLaw,
    NoiseModel,
    TrendModel,
    TruthTable,
    ViolationLaw,
)
from .designs import named_design
from .generator import gen_dgp, write_simulation

__all__ = [
    "AdoptionDesign",
    "DGPConfig",
    "EffectEntry",
    "EffectLaw",
    "NoiseModel",
    "TrendModel",
    "TruthTable",
    "ViolationLaw",
    "named_design",
    "gen_dgp",
    "write_simulation",
]
