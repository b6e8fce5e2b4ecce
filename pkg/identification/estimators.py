"""Plug-in estimators of conditional group-time effects.

``did_estimator`` is the within-stratum double difference valid under
conditional parallel trends. ``triple_diff_estimator`` subtracts the
matching double difference in another stratum, using only units still
under control there at time t.
"""

import logging
from collections.abc import Iterable
from typing import Optional, Union

import numpy as np

from panel import PanelDataset, TreatmentSchedule
from utils.errors import EmptyCohort, EmptyPlaceboCohort, InvalidWindow
from .models import ComparisonSet, EstimatorTag, GroupTimeEffect, TStarRule

logger = logging.getLogger(__name__)

Comparison = Union[ComparisonSet, Iterable[int]]
TStar = Union[TStarRule, int]


class _Window:
    """Validated (r, g, t, t*, comparison) in internal positions and periods."""

    def __init__(self, panel: PanelDataset, schedule: TreatmentSchedule, r: int, g: int, t: int,
                 t_star: TStar, comparison: Comparison):
        try:
            self.r = panel.r_index(r)
            self.g = panel.period(g)
            self.t = panel.period(t)
        except ValueError as e:
            raise InvalidWindow(str(e)) from None
        if not 2 <= self.g <= panel.T:
            raise InvalidWindow(f"initiation time {g} must be a treated period after the first")
        if not self.g <= self.t <= panel.T:
            raise InvalidWindow(f"evaluation time {t} must satisfy g <= t within the panel")

        if isinstance(t_star, TStarRule):
            self.base = [self.g - 1] if t_star == TStarRule.LAST_PRE else list(range(1, self.g))
        else:
            try:
                self.base = [panel.period(t_star)]
            except ValueError as e:
                raise InvalidWindow(str(e)) from None
        if any(b >= self.g or b < 1 for b in self.base):
            raise InvalidWindow(f"base period {t_star} must precede initiation time {g}")

        if comparison == ComparisonSet.NOT_YET_TREATED:
            self.comparison = [c for c in np.unique(schedule.g[:, self.r]) if c > self.t]
        elif comparison == ComparisonSet.NEVER_TREATED:
            self.comparison = [schedule.never]
        else:
            try:
                self.comparison = sorted({panel.period(c) for c in comparison})
            except ValueError as e:
                raise InvalidWindow(str(e)) from None
            late = [panel.t_label(c) for c in self.comparison if c <= self.t]
            if late:
                raise InvalidWindow(f"comparison cohorts {late} are treated by time {t}")
        self.comparison_labels = [panel.t_label(c) for c in self.comparison]


def _usable(panel: PanelDataset, units: np.ndarray, r: int, window: _Window) -> np.ndarray:
    """Units with present cells in stratum r at t and every base period."""
    needed = panel.mask[units, r, window.t - 1].copy()
    for b in window.base:
        needed &= panel.mask[units, r, b - 1]
    return units[needed]


def _mean_change(panel: PanelDataset, units: np.ndarray, r: int, window: _Window,
                 cell_weights: Optional[np.ndarray]) -> float:
    """(Weighted) mean over units of y at t minus the mean over base periods."""
    base = np.mean([panel.y[units, r, b - 1] for b in window.base], axis=0)
    change = panel.y[units, r, window.t - 1] - base
    if cell_weights is None:
        return float(change.mean())
    w = np.broadcast_to(cell_weights, panel.shape)[units, r, window.t - 1]
    return float(np.sum(w * change) / np.sum(w))


def _cohorts(panel: PanelDataset, schedule: TreatmentSchedule, window: _Window) -> tuple[np.ndarray, np.ndarray]:
    column = schedule.g[:, window.r]
    treated = _usable(panel, np.flatnonzero(column == window.g), window.r, window)
    comparison = _usable(panel, np.flatnonzero(np.isin(column, window.comparison)), window.r, window)
    return treated, comparison


def _double_difference(panel, schedule, window, cell_weights) -> tuple[float, int, int]:
    treated, comparison = _cohorts(panel, schedule, window)
    if treated.size == 0:
        raise EmptyCohort(f"no units initiate at {panel.t_label(window.g)} in stratum {panel.r_labels[window.r]}")
    if comparison.size == 0:
        raise EmptyCohort(f"no comparison units in stratum {panel.r_labels[window.r]} at time {panel.t_label(window.t)}")
    estimate = (
        _mean_change(panel, treated, window.r, window, cell_weights)
        - _mean_change(panel, comparison, window.r, window, cell_weights)
    )
    return estimate, int(treated.size), int(comparison.size)


def did_estimator(
    panel: PanelDataset,
    schedule: TreatmentSchedule,
    r: int,
    g: int,
    t: int,
    t_star: TStar = TStarRule.LAST_PRE,
    comparison: Comparison = ComparisonSet.NOT_YET_TREATED,
    cell_weights: Optional[np.ndarray] = None,
) -> GroupTimeEffect:
    """Within-stratum double difference for ATT_r(g, t).

    Args:
        panel: The dataset.
        schedule: Its treatment schedule.
        r: Stratum key.
        g: Initiation time (time label).
        t: Evaluation time, at or after ``g``.
        t_star: Base period label or rule; ``LAST_PRE`` uses g - 1,
            ``FULL_WINDOW`` averages over every period before g.
        comparison: Cohort rule or explicit cohort labels, all later than t
            (the never-treated cohort is labelled one past the last period).
        cell_weights: Optional per-cell weights for the unit means.

    Returns:
        The group-time effect tagged ``prop1``.

    Raises:
        InvalidWindow: The window violates g <= t, t* < g or g' > t.
        EmptyCohort: No treated or no comparison units.
    """
    window = _Window(panel, schedule, r, g, t, t_star, comparison)
    estimate, n_treated, n_comparison = _double_difference(panel, schedule, window, cell_weights)
    return GroupTimeEffect(
        r=panel.r_labels[window.r],
        g=panel.t_label(window.g),
        t=panel.t_label(window.t),
        estimate=estimate,
        n_treated=n_treated,
        n_comparison=n_comparison,
        estimator=EstimatorTag.PROP1,
        comparison=window.comparison_labels,
    )


def _placebo_difference(panel, schedule, window, treated, comparison, r_prime, cell_weights) -> Optional[float]:
    """Double difference in stratum r' over units still untreated there at t, or None."""
    untreated = schedule.g[:, r_prime] > window.t
    treated = _usable(panel, treated[untreated[treated]], r_prime, window)
    comparison = _usable(panel, comparison[untreated[comparison]], r_prime, window)
    if treated.size == 0 or comparison.size == 0:
        return None
    return (
        _mean_change(panel, treated, r_prime, window, cell_weights)
        - _mean_change(panel, comparison, r_prime, window, cell_weights)
    )


def triple_diff_estimator(
    panel: PanelDataset,
    schedule: TreatmentSchedule,
    r: int,
    r_prime: Optional[int],
    g: int,
    t: int,
    t_star: TStar = TStarRule.LAST_PRE,
    comparison: Comparison = ComparisonSet.NOT_YET_TREATED,
    cell_weights: Optional[np.ndarray] = None,
) -> GroupTimeEffect:
    """Triple difference for ATT_r(g, t) under a constant violation of parallel trends.

    The within-stratum double difference minus the matching double
    difference in placebo stratum r', where both cohorts are restricted to
    units with G_sr' > t. With ``r_prime=None`` the placebo term is the
    equal-weight average over every stratum r' != r with both restricted
    cohorts non-empty.

    Raises:
        InvalidWindow: As for ``did_estimator``, or r' == r.
        EmptyCohort: Empty treated or comparison cohort in stratum r.
        EmptyPlaceboCohort: No placebo stratum keeps both cohorts.
    """
    window = _Window(panel, schedule, r, g, t, t_star, comparison)
    primary, n_treated, n_comparison = _double_difference(panel, schedule, window, cell_weights)
    treated, comparison_units = _cohorts(panel, schedule, window)

    if r_prime is None:
        candidates = [k for k in range(panel.R) if k != window.r]
    else:
        try:
            candidates = [panel.r_index(r_prime)]
        except ValueError as e:
            raise InvalidWindow(str(e)) from None
        if candidates[0] == window.r:
            raise InvalidWindow("placebo stratum must differ from the primary stratum")

    placebos, strata = [], []
    for k in candidates:
        value = _placebo_difference(panel, schedule, window, treated, comparison_units, k, cell_weights)
        if value is None:
            logger.debug(f"Stratum {panel.r_labels[k]} has no untreated placebo cohort at t={t}")
            continue
        placebos.append(value)
        strata.append(panel.r_labels[k])

    if not placebos:
        raise EmptyPlaceboCohort(
            f"no placebo stratum keeps units under control at time {t} for ATT_{r}({g},{t})"
        )

    placebo = float(np.mean(placebos))
    return GroupTimeEffect(
        r=panel.r_labels[window.r],
        g=panel.t_label(window.g),
        t=panel.t_label(window.t),
        estimate=primary - placebo,
        n_treated=n_treated,
        n_comparison=n_comparison,
        estimator=EstimatorTag.PROP2,
        comparison=window.comparison_labels,
        placebo_strata=strata,
        primary=primary,
        placebo=placebo,
    )


def group_time_effects(
    panel: PanelDataset,
    schedule: TreatmentSchedule,
    estimator: EstimatorTag = EstimatorTag.PROP2,
    t_star: TStarRule = TStarRule.LAST_PRE,
    comparison: ComparisonSet = ComparisonSet.NOT_YET_TREATED,
    cell_weights: Optional[np.ndarray] = None,
) -> list[GroupTimeEffect]:
    """Estimate every identifiable ATT_r(g, t) with t >= g.

    Cells whose cohorts are empty under the chosen rules are skipped.
    """
    if estimator == EstimatorTag.IMPUTATION:
        raise ValueError("imputation effects come from the imputation module")

    effects = []
    for ri, r in enumerate(panel.r_labels):
        for gp in schedule.cohorts(ri):
            for tp in range(gp, panel.T + 1):
                g, t = panel.t_label(gp), panel.t_label(tp)
                try:
                    if estimator == EstimatorTag.PROP1:
                        effect = did_estimator(panel, schedule, r, g, t, t_star, comparison, cell_weights)
                    else:
                        effect = triple_diff_estimator(
                            panel, schedule, r, None, g, t, t_star, comparison, cell_weights
                        )
                except (EmptyCohort, EmptyPlaceboCohort) as e:
                    logger.debug(f"Skipping ATT_{r}({g},{t}): {e}")
                    continue
                effects.append(effect)
    return effects
