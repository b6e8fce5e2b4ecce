"""Imputation module: counterfactual prediction, event studies and placebo lags."""

from .models import (
    CellEffect,
    DropReason,
    DroppedCell,
    EventStudyCurve,
    EventStudyPoint,
    ImputationResult,
    PlaceboResult,
    PlaceboScope,
)
from .placebo import placebo_test
from .estimator import (
    ImputedArrays,
    att_overall,
    event_study,
    event_study_curve,
    impute_counterfactuals,
    imputation_att,
)

__all__ = [
    "CellEffect",
    "DropReason",
    "DroppedCell",
    "EventStudyCurve",
    "EventStudyPoint",
    "ImputationResult",
    "PlaceboResult",
    "PlaceboScope",
    "placebo_test",
    "ImputedArrays",
    "att_overall",
    "event_study",
    "event_study_curve",
    "impute_counterfactuals",
    "imputation_att",
]
