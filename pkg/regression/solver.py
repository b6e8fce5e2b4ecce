"""Weighted three-way fixed-effects solver by alternating projections.

Coefficients are updated one group at a time (Gauss-Seidel backfitting):
each group's effect becomes the weighted mean of the partial residual over
the group's cells. The fit over cells outside the subset is a prediction,
available only where all three of the cell's groups carry positive weight
and the fitting cells pin the sum alpha + gamma + delta down uniquely.
"""

import logging
from typing import Optional

import numpy as np

import config
from panel import PanelDataset
from utils.errors import InputError, NoResidualTreatmentVariation, NonConvergence
from .models import FEFit

logger = logging.getLogger(__name__)

_START_SEED = 0


def _safe_divide(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    out = np.zeros_like(numerator, dtype=float)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def _backfit(
    values: np.ndarray,
    weights: np.ndarray,
    watch: np.ndarray,
    tol: float,
    max_sweeps: int,
    start: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> tuple[np.ndarray, int, float]:
    """Project ``values`` onto the fixed-effect span under ``weights``.

    Returns the fitted alpha + gamma + delta on the full grid (meaningful on
    identified cells), the sweep count and the last max change over ``watch``.
    ``start`` sets the initial (gamma, delta); zeros by default.
    """
    S, R, T = values.shape
    w_sr = weights.sum(axis=2)
    w_st = weights.sum(axis=1)
    w_rt = weights.sum(axis=0)
    wv = weights * values

    alpha = np.zeros((S, R))
    gamma, delta = (np.zeros((S, T)), np.zeros((R, T))) if start is None else start
    previous = alpha[:, :, None] + gamma[:, None, :] + delta[None, :, :]
    change = np.inf

    for sweep in range(1, max_sweeps + 1):
        alpha = _safe_divide(
            (wv - weights * (gamma[:, None, :] + delta[None, :, :])).sum(axis=2), w_sr
        )
        gamma = _safe_divide(
            (wv - weights * (alpha[:, :, None] + delta[None, :, :])).sum(axis=1), w_st
        )
        delta = _safe_divide(
            (wv - weights * (alpha[:, :, None] + gamma[:, None, :])).sum(axis=0), w_rt
        )
        fitted = alpha[:, :, None] + gamma[:, None, :] + delta[None, :, :]
        change = float(np.max(np.abs(fitted - previous)[watch], initial=0.0))
        if change < tol:
            logger.debug(f"Backfitting converged after {sweep} sweeps (change {change:.3g})")
            return fitted, sweep, change
        previous = fitted

    raise NonConvergence(
        f"fixed-effects solver did not converge in {max_sweeps} sweeps (last change {change:.3g})"
    )


def anchored_cells(weights: np.ndarray) -> np.ndarray:
    """Cells whose (s,r), (s,t) and (r,t) groups all carry positive weight."""
    w_sr = weights.sum(axis=2) > 0
    w_st = weights.sum(axis=1) > 0
    w_rt = weights.sum(axis=0) > 0
    return w_sr[:, :, None] & w_st[:, None, :] & w_rt[None, :, :]


def identified_cells(weights: np.ndarray, tol: float = config.FE_TOLERANCE,
                     max_sweeps: int = config.FE_MAX_SWEEPS) -> np.ndarray:
    """Cells whose fitted alpha + gamma + delta is unique given the weighted cells.

    Positive weight in all three of a cell's groups is necessary but not
    sufficient: the fitting cells can leave a direction of the fixed effects
    free that still moves the cell's prediction. Backfitting a zero outcome
    from a random start ends at such a free direction, so cells whose fitted
    value stays away from zero are not identified.
    """
    anchored = anchored_cells(weights)
    if not (anchored & (weights == 0)).any():
        return anchored
    S, R, T = weights.shape
    rng = np.random.default_rng(_START_SEED)
    start = (rng.standard_normal((S, T)), rng.standard_normal((R, T)))
    drift, _, _ = _backfit(np.zeros(weights.shape), weights, anchored, tol, max_sweeps, start)
    return anchored & (np.abs(drift) <= config.IDENTIFICATION_TOL)


def fit_three_way_fe(
    panel: PanelDataset,
    cell_weights: Optional[np.ndarray] = None,
    subset: Optional[np.ndarray] = None,
    include_treatment: bool = False,
    values: Optional[np.ndarray] = None,
    tol: float = config.FE_TOLERANCE,
    max_sweeps: int = config.FE_MAX_SWEEPS,
) -> FEFit:
    """Weighted least squares of y on alpha_sr + gamma_st + delta_rt (+ tau d).

    Args:
        panel: The dataset.
        cell_weights: Nonnegative per-cell weights; ones when omitted.
        subset: Boolean (S, R, T) mask of fitting cells; all present cells
            when omitted.
        include_treatment: Also estimate tau on d (by partialling out the
            fixed effects from both y and d).
        values: Outcome to fit instead of ``panel.y``.
        tol: Convergence threshold on the max change in fitted values.
        max_sweeps: Sweep cap.

    Returns:
        The fit. Cells with an unanchored group, or whose prediction the
        fitting cells leave free, have NaN predictions; callers report them as ``UnanchoredPrediction`` rather than failing.

    Raises:
        InputError: Empty subset or invalid weights.
        NonConvergence: Sweep cap reached.
        NoResidualTreatmentVariation: ``include_treatment`` with a treatment
            fully absorbed by the fixed effects on the subset.
    """
    shape = panel.shape
    subset = panel.mask.copy() if subset is None else (np.asarray(subset, dtype=bool) & panel.mask)
    if cell_weights is None:
        cell_weights = np.ones(shape)
    cell_weights = np.broadcast_to(np.asarray(cell_weights, dtype=float), shape)
    if not np.isfinite(cell_weights).all() or (cell_weights < 0).any():
        raise InputError("cell weights must be finite and nonnegative")

    weights = np.where(subset, cell_weights, 0.0)
    if not (weights > 0).any():
        raise InputError("fitting subset is empty (no cell with positive weight)")

    y = np.where(subset, panel.y if values is None else np.asarray(values, dtype=float), 0.0)
    anchored = identified_cells(weights, tol, max_sweeps)

    tau = None
    iterations = 0
    if include_treatment:
        d = np.where(subset, panel.d, 0).astype(float)
        d_hat, sweeps_d, _ = _backfit(d, weights, anchored, tol, max_sweeps)
        y_hat, sweeps_y, _ = _backfit(y, weights, anchored, tol, max_sweeps)
        d_res = np.where(weights > 0, d - d_hat, 0.0)
        y_res = np.where(weights > 0, y - y_hat, 0.0)
        denominator = float(np.sum(weights * d_res ** 2))
        if denominator <= config.DEGENERATE_TOL:
            raise NoResidualTreatmentVariation("treatment is absorbed by the fixed effects on this subset")
        tau = float(np.sum(weights * d_res * y_res)) / denominator
        iterations += sweeps_d + sweeps_y
        y = y - tau * d

    fe, sweeps, change = _backfit(y, weights, anchored, tol, max_sweeps)
    iterations += sweeps

    fixed_effects = np.where(anchored, fe, np.nan)
    fitted = fixed_effects + (tau * panel.d if tau is not None else 0.0)
    return FEFit(
        fixed_effects=fixed_effects,
        fitted=fitted,
        anchored=anchored,
        subset=subset,
        tau=tau,
        iterations=iterations,
        final_change=change,
    )


def weighted_tdr_estimate(panel: PanelDataset, cell_weights: Optional[np.ndarray] = None) -> float:
    """Regression coefficient on d under per-cell weights, via the iterative solver."""
    weights = panel.cell_weights() if cell_weights is None else cell_weights
    return fit_three_way_fe(panel, cell_weights=weights, include_treatment=True).tau
