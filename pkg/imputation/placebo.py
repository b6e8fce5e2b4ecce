"""Placebo tests on pre-treatment periods by shifting treatment earlier."""

import logging
from typing import Optional

import numpy as np

from panel import PanelDataset, TreatmentSchedule
from regression import fit_three_way_fe
from utils.errors import InputError, InsufficientPretreatmentData
from .models import PlaceboResult, PlaceboScope

logger = logging.getLogger(__name__)


def _placebo_cells(panel: PanelDataset, schedule: TreatmentSchedule, lag: int,
                   scope: PlaceboScope) -> tuple[np.ndarray, np.ndarray]:
    """(fit, predict) masks for treatment shifted ``lag`` periods earlier.

    Fitting cells: every never-treated cell plus eventually-treated cells
    before g - lag. Predicted cells: g - lag <= t < g, or only t == g - lag.
    """
    periods = panel.periods[None, None, :]
    g = schedule.g[:, :, None]
    eventually = ~schedule.never_treated[:, :, None]
    fit = panel.mask & (~eventually | (periods < g - lag))
    if scope == PlaceboScope.WINDOW:
        predict = (periods >= g - lag) & (periods < g)
    else:
        predict = periods == g - lag
    return fit, panel.mask & eventually & predict


def placebo_test(
    panel: PanelDataset,
    schedule: TreatmentSchedule,
    lag: int,
    scope: PlaceboScope = PlaceboScope.WINDOW,
    cell_weights: Optional[np.ndarray] = None,
) -> PlaceboResult:
    """Average prediction error on untreated cells under treatment shifted ``lag`` periods earlier.

    Under parallel trends the estimate is near zero; a systematic departure
    signals a pre-trend.

    Raises:
        InputError: ``lag`` < 1.
        InsufficientPretreatmentData: Nothing left to fit, or no pseudo-treated
            cell with an anchored prediction.
    """
    if lag < 1:
        raise InputError(f"placebo lag must be at least 1, got {lag}")
    fit_cells, predict = _placebo_cells(panel, schedule, lag, scope)
    if not fit_cells.any():
        raise InsufficientPretreatmentData(f"no cells to fit at placebo lag {lag}")

    fit = fit_three_way_fe(panel, cell_weights=cell_weights, subset=fit_cells)
    ok = predict & fit.anchored
    if not ok.any():
        raise InsufficientPretreatmentData(f"no pseudo-treated cell has an anchored prediction at lag {lag}")

    dropped = int(predict.sum() - ok.sum())
    if dropped:
        logger.info(f"Placebo lag {lag}: {dropped} pseudo-treated cells unanchored and dropped")
    w = np.ones(panel.shape) if cell_weights is None else np.broadcast_to(cell_weights, panel.shape)
    error = panel.y[ok] - fit.fixed_effects[ok]
    estimate = float(np.sum(w[ok] * error) / np.sum(w[ok]))
    return PlaceboResult(lag=lag, estimate=estimate, n=int(ok.sum()), dropped=dropped)
