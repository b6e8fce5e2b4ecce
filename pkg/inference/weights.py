"""Random cluster weights for the Bayesian bootstrap.

Every cluster gets an Exponential(1) weight, so no cluster is ever dropped
from a draw. The pigeonhole scheme weights a cell by the product of its
s-weight and its r-weight.
"""

import numpy as np

from panel import PanelDataset
from utils.errors import TooFewClusters
from .models import BootstrapConfig, BootstrapScheme, ClusterKey

# Exponential draws of exactly 0.0 are possible in floating point
_MIN_WEIGHT = np.finfo(float).tiny


def _exponential(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.maximum(rng.exponential(1.0, size=size), _MIN_WEIGHT)


def cluster_ids(panel: PanelDataset, key: ClusterKey) -> np.ndarray:
    """Integer cluster label for every (s, r) series."""
    s, r = np.indices((panel.S, panel.R))
    if key == ClusterKey.S:
        return s
    if key == ClusterKey.R:
        return r
    return s * panel.R + r


def draw_one_way_weights(clusters: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One Exponential(1) weight per distinct cluster, in sorted label order.

    Args:
        clusters: Cluster label of each observation.
        rng: Random generator.

    Returns:
        Per-cluster weights; index them with the inverse of ``np.unique``.

    Raises:
        TooFewClusters: Fewer than two clusters.
    """
    n = len(np.unique(clusters))
    if n < 2:
        raise TooFewClusters(f"bootstrap needs at least 2 clusters, got {n}")
    return _exponential(rng, n)


def draw_pigeonhole_weights(S: int, R: int, rng: np.random.Generator) -> np.ndarray:
    """(S, R) matrix of products w_s * w_r with independent Exponential(1) factors.

    Raises:
        TooFewClusters: S < 2 or R < 2.
    """
    if S < 2 or R < 2:
        raise TooFewClusters(f"pigeonhole bootstrap needs S >= 2 and R >= 2, got S={S}, R={R}")
    w_s = _exponential(rng, S)
    w_r = _exponential(rng, R)
    return np.outer(w_s, w_r)


def draw_cell_weights(panel: PanelDataset, config: BootstrapConfig, rng: np.random.Generator) -> np.ndarray:
    """Per-cell weights for one draw, constant over t and zero on missing cells."""
    if config.scheme == BootstrapScheme.PIGEONHOLE_TWO_WAY:
        series = draw_pigeonhole_weights(panel.S, panel.R, rng)
    else:
        clusters = cluster_ids(panel, config.cluster_key)
        labels, inverse = np.unique(clusters, return_inverse=True)
        series = draw_one_way_weights(labels, rng)[inverse].reshape(clusters.shape)
    return series[:, :, None] * panel.mask
