"""Regression module: triple-demeaning, dense oracle and the weighted fixed-effects solver."""

from .models import FEFit, MeanField, ResidualField
from .demean import mean_field, require_balanced, tdr_estimate, triple_demean
from .oracle import dense_ols_oracle
from .solver import anchored_cells, fit_three_way_fe, identified_cells, weighted_tdr_estimate

__all__ = [
    "FEFit",
    "MeanField",
    "ResidualField",
    "mean_field",
    "require_balanced",
    "tdr_estimate",
    "triple_demean",
    "dense_ols_oracle",
    "anchored_cells",
    "fit_three_way_fe",
    "identified_cells",
    "weighted_tdr_estimate",
]
