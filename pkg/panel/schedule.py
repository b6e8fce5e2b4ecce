"""Treatment schedules: derivation, materialization and staggering repair."""

import logging

import numpy as np

from utils.errors import TreatedAtBaseline, TreatmentReversal
from .models import PanelDataset, StaggerPolicy, TreatmentSchedule

logger = logging.getLogger(__name__)


def _reversal_cells(panel: PanelDataset) -> np.ndarray:
    """Present control cells whose previous present cell in the series is treated."""
    positions = np.arange(panel.T)[None, None, :]
    last_present = np.maximum.accumulate(np.where(panel.mask, positions, -1), axis=2)
    previous = np.full_like(last_present, -1)
    previous[:, :, 1:] = last_present[:, :, :-1]
    prev_d = np.take_along_axis(panel.d, np.clip(previous, 0, None), axis=2)
    return panel.mask & (panel.d == 0) & (previous >= 0) & (prev_d == 1)


def _first_present(panel: PanelDataset) -> np.ndarray:
    """Position of each series' first present period (0 when the series is absent)."""
    return np.argmax(panel.mask, axis=2)


def _cell(panel: PanelDataset, s: int, r: int, t: int) -> str:
    return f"(s={panel.s_labels[s]}, r={panel.r_labels[r]}, t={panel.t_labels[t]})"


def derive_schedule(panel: PanelDataset) -> TreatmentSchedule:
    """Derive G_sr = first treated period for every (s, r) series.

    Only present cells are inspected, so a series entering the panel late
    starts at its first observed period. Absent series are never-treated.

    Args:
        panel: The dataset.

    Returns:
        The treatment schedule.

    Raises:
        TreatmentReversal: A series switches from treated back to control.
        TreatedAtBaseline: A series is treated in its first observed period.
    """
    reversal = _reversal_cells(panel)
    if reversal.any():
        s, r, t = (int(v) for v in np.argwhere(reversal)[0])
        raise TreatmentReversal(f"treatment switches off at {_cell(panel, s, r, t)}")

    first = _first_present(panel)
    has_cells = panel.mask.any(axis=2)
    baseline_d = np.take_along_axis(panel.d, first[:, :, None], axis=2)[:, :, 0]
    baseline = has_cells & (baseline_d == 1)
    if baseline.any():
        s, r = (int(v) for v in np.argwhere(baseline)[0])
        raise TreatedAtBaseline(f"series already treated at its first period {_cell(panel, s, r, first[s, r])}")

    treated = panel.mask & (panel.d == 1)
    g = np.where(treated.any(axis=2), np.argmax(treated, axis=2) + 1, panel.never)
    return TreatmentSchedule(g=g.astype(np.int64), T=panel.T)


def materialize(schedule: TreatmentSchedule, panel: PanelDataset) -> PanelDataset:
    """Rebuild the panel's treatment column from a schedule (d = t >= G_sr)."""
    if schedule.g.shape != (panel.S, panel.R) or schedule.T != panel.T:
        raise ValueError("schedule does not match the panel's dimensions")
    d = (schedule.treated() & panel.mask).astype(np.int8)
    return panel.replace(d=d)


def filter_to_staggered(panel: PanelDataset, policy: StaggerPolicy = StaggerPolicy.DROP_PREFIX) -> PanelDataset:
    """Drop the minimal prefix of each series that restores staggered adoption.

    For a series with a treated-to-control switch, every period up to and
    including the last treated period preceding the final switch is dropped.
    A series treated from its first observed period with no control period
    left is dropped entirely. Dropped cells are masked out and logged.

    Args:
        panel: The dataset.
        policy: ``DROP_PREFIX`` repairs; ``ERROR`` raises on the first violation.

    Returns:
        A dataset that passes ``derive_schedule``.

    Raises:
        TreatmentReversal: Under the error policy.
    """
    if policy == StaggerPolicy.ERROR:
        derive_schedule(panel)
        return panel

    reversal = _reversal_cells(panel)
    positions = np.arange(panel.T)[None, None, :]
    # Last switch point per series; everything before it goes
    last_switch = np.where(reversal, positions, -1).max(axis=2)
    drop = panel.mask & (positions < last_switch[:, :, None])

    kept = panel.mask & ~drop
    kept_d = np.where(kept, panel.d, 0)
    first = np.argmax(kept, axis=2)
    starts_treated = kept.any(axis=2) & (np.take_along_axis(kept_d, first[:, :, None], axis=2)[:, :, 0] == 1)
    drop |= kept & starts_treated[:, :, None]

    if not drop.any():
        return panel

    for s, r, t in np.argwhere(drop):
        logger.info(f"Dropped cell {_cell(panel, s, r, t)} to restore staggered adoption")
    logger.info(f"filter_to_staggered dropped {int(drop.sum())} cells")

    mask = panel.mask & ~drop
    return panel.replace(
        mask=mask,
        y=np.where(mask, panel.y, np.nan),
        d=np.where(mask, panel.d, 0).astype(np.int8),
    )
