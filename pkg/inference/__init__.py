"""Inference module: Bayesian cluster and pigeonhole bootstrap."""

from .models import BootstrapBand, BootstrapConfig, BootstrapScheme, BootstrapSummary, ClusterKey
from .weights import cluster_ids, draw_cell_weights, draw_one_way_weights, draw_pigeonhole_weights
from .bootstrap import bootstrap, bootstrap_vector, draw_rng

__all__ = [
    "BootstrapBand",
    "BootstrapConfig",
    "BootstrapScheme",
    "BootstrapSummary",
    "ClusterKey",
    "cluster_ids",
    "draw_cell_weights",
    "draw_one_way_weights",
    "draw_pigeonhole_weights",
    "bootstrap",
    "bootstrap_vector",
    "draw_rng",
]
