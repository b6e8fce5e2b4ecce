"""Imputation estimator: fit the fixed-effects model on control cells, predict treated cells."""

import logging
from collections.abc import Sequence
from typing import Optional

import numpy as np

from identification import Weighting
from panel import PanelDataset, TreatmentSchedule
from regression import fit_three_way_fe
from utils.errors import EmptyEffects, InsufficientPretreatmentData, NoControls
from .models import CellEffect, DroppedCell, EventStudyCurve, EventStudyPoint, ImputationResult, PlaceboScope
from .placebo import placebo_test

logger = logging.getLogger(__name__)


class ImputedArrays:
    """Grid-shaped imputation output shared by the public functions."""

    def __init__(self, panel: PanelDataset, schedule: TreatmentSchedule,
                 cell_weights: Optional[np.ndarray] = None):
        controls = panel.mask & (panel.d == 0)
        if not controls.any():
            raise NoControls("no control cells to fit the untreated-outcome model")
        fit = fit_three_way_fe(panel, cell_weights=cell_weights, subset=controls)

        self.treated = panel.mask & (panel.d == 1)
        self.ok = self.treated & fit.anchored
        self.y0 = fit.fixed_effects
        self.effect = np.where(self.ok, panel.y - np.nan_to_num(self.y0), np.nan)
        self.event_time = panel.periods[None, None, :] - schedule.g[:, :, None]
        self.cohort = np.broadcast_to(schedule.g[:, :, None], panel.shape)
        self.iterations = fit.iterations
        self.weights = (
            np.ones(panel.shape) if cell_weights is None
            else np.broadcast_to(np.asarray(cell_weights, dtype=float), panel.shape)
        )

        dropped = int(self.treated.sum() - self.ok.sum())
        if dropped:
            logger.info(f"{dropped} treated cells have no anchored counterfactual and are dropped")

    def cohort_sizes(self) -> np.ndarray:
        """Per-cell count of distinct units in the cell's (r, g) cohort among imputed cells."""
        has_effect = self.ok.any(axis=2)
        g = self.cohort[:, :, 0]
        sizes = np.zeros(g.shape)
        for r in range(g.shape[1]):
            for cohort in np.unique(g[has_effect[:, r], r]):
                members = has_effect[:, r] & (g[:, r] == cohort)
                sizes[members, r] = members.sum()
        return np.broadcast_to(sizes[:, :, None], self.ok.shape)

    def average(self, cells: np.ndarray, weighting: Weighting = Weighting.UNIFORM) -> float:
        w = self.weights[cells]
        if weighting == Weighting.COHORT_SIZE:
            w = w * self.cohort_sizes()[cells]
        return float(np.sum(w * self.effect[cells]) / np.sum(w))


def impute_counterfactuals(
    panel: PanelDataset,
    schedule: TreatmentSchedule,
    cell_weights: Optional[np.ndarray] = None,
) -> ImputationResult:
    """Impute untreated outcomes for every treated cell.

    The three-way fixed-effects model is fit on control cells only, so
    treatment effects never enter the fit.

    Args:
        panel: The dataset; masked cells are ignored.
        schedule: Its treatment schedule.
        cell_weights: Optional per-cell weights for the control fit.

    Returns:
        Imputed effects, plus treated cells without an anchored prediction.

    Raises:
        NoControls: The panel has no control cells.
        NonConvergence: The solver hit its sweep cap.
    """
    arrays = ImputedArrays(panel, schedule, cell_weights)
    effects = [
        CellEffect(
            s=panel.s_labels[s],
            r=panel.r_labels[r],
            t=panel.t_labels[t],
            g=panel.t_label(schedule.g[s, r]),
            y=float(panel.y[s, r, t]),
            y0=float(arrays.y0[s, r, t]),
            effect=float(arrays.effect[s, r, t]),
            event_time=int(arrays.event_time[s, r, t]),
        )
        for s, r, t in np.argwhere(arrays.ok)
    ]
    dropped = [
        DroppedCell(s=panel.s_labels[s], r=panel.r_labels[r], t=panel.t_labels[t])
        for s, r, t in np.argwhere(arrays.treated & ~arrays.ok)
    ]
    return ImputationResult(effects=effects, dropped=dropped, iterations=arrays.iterations)


def att_overall(effects: Sequence[CellEffect], weighting: Weighting = Weighting.UNIFORM) -> float:
    """Average imputed effect over treated cells.

    ``COHORT_SIZE`` weights each cell by the number of units in its
    (r, g) cohort.

    Raises:
        EmptyEffects: No effects.
    """
    if not effects:
        raise EmptyEffects("no imputed effects to average")
    values = np.array([e.effect for e in effects])
    if weighting == Weighting.UNIFORM:
        return float(values.mean())

    members: dict[tuple[int, int], set[int]] = {}
    for e in effects:
        members.setdefault((e.r, e.g), set()).add(e.s)
    w = np.array([len(members[(e.r, e.g)]) for e in effects], dtype=float)
    return float(np.dot(w, values) / w.sum())


def imputation_att(
    panel: PanelDataset,
    schedule: TreatmentSchedule,
    weighting: Weighting = Weighting.UNIFORM,
    cell_weights: Optional[np.ndarray] = None,
) -> float:
    """Overall imputation ATT straight from the grid, weighted by ``cell_weights``.

    With unit weights this equals ``att_overall(impute_counterfactuals(...).effects)``.
    """
    arrays = ImputedArrays(panel, schedule, cell_weights)
    if not arrays.ok.any():
        raise EmptyEffects("no treated cell has an anchored counterfactual")
    return arrays.average(arrays.ok, weighting)


def event_study_points(arrays: ImputedArrays, max_post: int) -> list[EventStudyPoint]:
    points = []
    for k in range(max_post + 1):
        cells = arrays.ok & (arrays.event_time == k)
        n = int(cells.sum())
        points.append(EventStudyPoint(k=k, estimate=arrays.average(cells) if n else None, n=n))
    return points


def event_study(
    panel: PanelDataset,
    schedule: TreatmentSchedule,
    max_post: int,
    cell_weights: Optional[np.ndarray] = None,
) -> EventStudyCurve:
    """Average imputed effect at each event time k = 0..max_post.

    Units initiating at different calendar times share an event time, so
    the cohorts behind each point shift with k; the counts report that.
    Points with no imputed cell carry ``n == 0`` and no estimate.
    """
    if max_post < 0:
        raise ValueError("max_post must be nonnegative")
    arrays = ImputedArrays(panel, schedule, cell_weights)
    return EventStudyCurve(points=event_study_points(arrays, max_post))


def event_study_curve(
    panel: PanelDataset,
    schedule: TreatmentSchedule,
    max_pre: int,
    max_post: int,
    scope: PlaceboScope = PlaceboScope.WINDOW,
    cell_weights: Optional[np.ndarray] = None,
) -> EventStudyCurve:
    """Event study with placebo lags 1..max_pre reported at k = -lag.

    A lag with insufficient pre-treatment data becomes a point with n == 0.
    """
    pre = []
    for lag in range(max_pre, 0, -1):
        try:
            result = placebo_test(panel, schedule, lag, scope, cell_weights)
        except InsufficientPretreatmentData as e:
            logger.warning(f"Placebo lag {lag} skipped: {e}")
            pre.append(EventStudyPoint(k=-lag))
            continue
        pre.append(EventStudyPoint(k=-lag, estimate=result.estimate, n=result.n))
    post = event_study(panel, schedule, max_post, cell_weights).points
    return EventStudyCurve(points=pre + post)
