"""Aggregation of group-time effects into a single summary effect."""

from collections.abc import Sequence
from typing import Union

import numpy as np

from utils.errors import EmptyEffects, MissingWeight, UnnormalizedWeights
from .models import AggregationWeights, GroupTimeEffect, Weighting

NORMALIZATION_TOL = 1e-9


def uniform_weights(effects: Sequence[GroupTimeEffect]) -> AggregationWeights:
    n = len(effects)
    return AggregationWeights(weights={e.key: 1.0 / n for e in effects})


def cohort_size_weights(effects: Sequence[GroupTimeEffect]) -> AggregationWeights:
    """Weights proportional to each effect's treated-cohort size."""
    total = sum(e.n_treated for e in effects)
    return AggregationWeights(weights={e.key: e.n_treated / total for e in effects})


def aggregate_atts(
    effects: Sequence[GroupTimeEffect],
    weights: Union[AggregationWeights, Weighting] = Weighting.UNIFORM,
) -> float:
    """Weighted sum of group-time effects.

    Args:
        effects: Effects with distinct (r, g, t) keys.
        weights: Explicit weights summing to one over ``effects``, or a
            weighting rule.

    Returns:
        The aggregate effect.

    Raises:
        EmptyEffects: No effects.
        MissingWeight: An effect has no weight.
        UnnormalizedWeights: Weights over the effects do not sum to one.
    """
    if not effects:
        raise EmptyEffects("no group-time effects to aggregate")
    if weights == Weighting.UNIFORM:
        weights = uniform_weights(effects)
    elif weights == Weighting.COHORT_SIZE:
        weights = cohort_size_weights(effects)

    missing = [e.key for e in effects if e.key not in weights.weights]
    if missing:
        raise MissingWeight(f"no weight for effects {missing}")
    w = np.array([weights.weights[e.key] for e in effects])
    if abs(w.sum() - 1.0) > NORMALIZATION_TOL:
        raise UnnormalizedWeights(f"weights sum to {w.sum():.12g}, not 1")
    return float(np.dot(w, [e.estimate for e in effects]))
