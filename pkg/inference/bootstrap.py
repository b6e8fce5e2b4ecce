"""Bayesian bootstrap of weighted estimators."""

import logging
from collections.abc import Callable
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

import config
from panel import PanelDataset
from utils.errors import AllDrawsFailed, TripDiffError
from .models import BootstrapBand, BootstrapConfig, BootstrapSummary
from .weights import draw_cell_weights

logger = logging.getLogger(__name__)

WeightedEstimator = Callable[[np.ndarray], float]
WeightedVectorEstimator = Callable[[np.ndarray], np.ndarray]


def draw_rng(seed: int, draw: int) -> np.random.Generator:
    """Random stream for one draw, keyed by (seed, draw index)."""
    return np.random.default_rng([seed, draw])


def _run_draws(panel: PanelDataset, estimator: Callable, boot: BootstrapConfig, n_jobs: int) -> list:
    def one(b: int):
        weights = draw_cell_weights(panel, boot, draw_rng(boot.seed, b))
        try:
            return estimator(weights)
        except TripDiffError as e:
            logger.debug(f"Bootstrap draw {b} failed: {type(e).__name__}: {e}")
            return None

    # joblib returns results in submission order whatever the thread count
    results = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(one)(b) for b in range(boot.draws))
    failed = sum(r is None for r in results)
    if failed:
        logger.warning(f"{failed} of {boot.draws} bootstrap draws failed and were excluded")
    if failed == boot.draws:
        raise AllDrawsFailed(f"all {boot.draws} bootstrap draws failed")
    return results


def bootstrap(
    panel: PanelDataset,
    estimator: WeightedEstimator,
    boot: Optional[BootstrapConfig] = None,
    n_jobs: int = config.DEFAULT_THREADS,
) -> BootstrapSummary:
    """Standard error and normal interval for a weighted estimator.

    Args:
        panel: The dataset the estimator runs on.
        estimator: Maps per-cell weights (S, R, T) to an estimate; unit
            weights must give the full-sample estimate.
        boot: Bootstrap settings.
        n_jobs: Worker threads.

    Returns:
        Summary with the full-sample point estimate and ci = point +/- 1.96 se.

    Raises:
        AllDrawsFailed: No draw produced an estimate.
    """
    boot = boot or BootstrapConfig()
    point = float(estimator(panel.cell_weights()))
    results = _run_draws(panel, estimator, boot, n_jobs)
    draws = [float(r) for r in results if r is not None]

    if len(draws) >= 2:
        se = float(np.std(draws, ddof=1))
    else:
        logger.warning("Only one bootstrap draw succeeded; standard error set to 0")
        se = 0.0
    return BootstrapSummary(
        estimate=point,
        se=se,
        ci_lo=point - config.CI_Z * se,
        ci_hi=point + config.CI_Z * se,
        bootstrap_mean=float(np.mean(draws)),
        draws=draws,
        b_requested=boot.draws,
        b_failed=boot.draws - len(draws),
        scheme=boot.scheme,
        seed=boot.seed,
    )


def bootstrap_vector(
    panel: PanelDataset,
    estimator: WeightedVectorEstimator,
    boot: Optional[BootstrapConfig] = None,
    n_jobs: int = config.DEFAULT_THREADS,
) -> BootstrapBand:
    """Pointwise bootstrap for an estimator returning a vector (NaN marks undefined entries)."""
    boot = boot or BootstrapConfig()
    point = np.asarray(estimator(panel.cell_weights()), dtype=float)
    results = _run_draws(panel, estimator, boot, n_jobs)
    matrix = np.array([r for r in results if r is not None], dtype=float).reshape(-1, point.size)

    defined = np.isfinite(matrix).sum(axis=0)
    se = np.zeros(point.size)
    enough = defined >= 2
    if enough.any():
        se[enough] = np.nanstd(matrix[:, enough], axis=0, ddof=1)

    def listed(values: np.ndarray) -> list[Optional[float]]:
        return [float(v) if np.isfinite(p) else None for v, p in zip(values, point)]

    return BootstrapBand(
        estimate=listed(point),
        se=listed(se),
        ci_lo=listed(point - config.CI_Z * se),
        ci_hi=listed(point + config.CI_Z * se),
        b_requested=boot.draws,
        b_failed=boot.draws - matrix.shape[0],
        scheme=boot.scheme,
        seed=boot.seed,
    )
