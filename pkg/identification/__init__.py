"""Identification module: plug-in group-time effects and their aggregation."""

from .models import (
    AggregationWeights,
    ComparisonSet,
    EstimatorTag,
    GroupTimeEffect,
    TStarRule,
    Weighting,
)
from .estimators import did_estimator, group_time_effects, triple_diff_estimator
from .aggregate import aggregate_atts, cohort_size_weights, uniform_weights

__all__ = [
    "AggregationWeights",
    "ComparisonSet",
    "EstimatorTag",
    "GroupTimeEffect",
    "TStarRule",
    "Weighting",
    "did_estimator",
    "group_time_effects",
    "triple_diff_estimator",
    "aggregate_atts",
    "cohort_size_weights",
    "uniform_weights",
]
