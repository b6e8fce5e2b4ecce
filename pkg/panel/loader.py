"""Ingest cell records and individual rows into a PanelDataset."""

import logging
from collections.abc import Iterable, Mapping
from typing import Union

import numpy as np
import pandas as pd

from utils.errors import (
    DuplicateCell,
    EmptyInput,
    InputError,
    MixedTreatmentInCell,
    NonBinaryTreatment,
)
from utils.storage import save_csv
from .models import IndividualRow, PanelDataset

logger = logging.getLogger(__name__)

KEYS = ["s", "r", "t"]
CELL_COLUMNS = ["s", "r", "t", "y", "d"]
SCHEDULE_COLUMNS = ["s", "r", "t", "y", "g"]

Rows = Union[pd.DataFrame, Iterable[Mapping], Iterable[IndividualRow]]


def _to_frame(rows: Rows) -> pd.DataFrame:
    """Normalize supported row containers to a data frame."""
    if isinstance(rows, pd.DataFrame):
        return rows.copy()
    records = [row.model_dump() if isinstance(row, IndividualRow) else dict(row) for row in rows]
    return pd.DataFrame.from_records(records)


def _require_columns(frame: pd.DataFrame, columns: list[str]) -> None:
    if frame.empty:
        raise EmptyInput("no rows supplied")
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise InputError(f"missing columns: {', '.join(missing)}")


def _integer_keys(frame: pd.DataFrame) -> pd.DataFrame:
    """Validate and cast the s, r, t key columns to integers."""
    for col in KEYS:
        values = pd.to_numeric(frame[col], errors="coerce")
        if values.isna().any() or not np.all(values == np.floor(values)):
            raise InputError(f"column {col} must hold integer keys")
        frame[col] = values.astype(np.int64)
    return frame


def _check_treatment(frame: pd.DataFrame) -> pd.DataFrame:
    d = pd.to_numeric(frame["d"], errors="coerce")
    bad = ~d.isin([0, 1])
    if bad.any():
        row = frame.loc[bad].iloc[0]
        raise NonBinaryTreatment(
            f"treatment {row['d']!r} at (s={row['s']}, r={row['r']}, t={row['t']}) is not 0 or 1"
        )
    frame["d"] = d.astype(np.int8)
    return frame


def _check_outcome(frame: pd.DataFrame) -> pd.DataFrame:
    y = pd.to_numeric(frame["y"], errors="coerce")
    if not np.isfinite(y.to_numpy(dtype=float)).all():
        raise InputError("outcome column y must hold finite reals")
    frame["y"] = y.astype(float)
    return frame


def _build_panel(cells: pd.DataFrame, unit_counts: pd.Series | None = None) -> PanelDataset:
    """Scatter validated one-row-per-cell records onto the (s, r, t) grid."""
    s_labels = tuple(int(v) for v in np.sort(cells["s"].unique()))
    r_labels = tuple(int(v) for v in np.sort(cells["r"].unique()))
    t_first, t_last = int(cells["t"].min()), int(cells["t"].max())
    t_labels = tuple(range(t_first, t_last + 1))

    shape = (len(s_labels), len(r_labels), len(t_labels))
    si = np.searchsorted(s_labels, cells["s"].to_numpy())
    ri = np.searchsorted(r_labels, cells["r"].to_numpy())
    ti = cells["t"].to_numpy() - t_first

    y = np.full(shape, np.nan)
    d = np.zeros(shape, dtype=np.int8)
    mask = np.zeros(shape, dtype=bool)
    y[si, ri, ti] = cells["y"].to_numpy(dtype=float)
    d[si, ri, ti] = cells["d"].to_numpy()
    mask[si, ri, ti] = True

    counts = np.ones(shape[:2], dtype=np.int64)
    if unit_counts is not None:
        for (s, r), n in unit_counts.items():
            counts[s_labels.index(int(s)), r_labels.index(int(r))] = int(n)

    missing = int(mask.size - mask.sum())
    if missing:
        logger.info(f"Panel has {missing} missing cells out of {mask.size}")

    return PanelDataset(
        s_labels=s_labels,
        r_labels=r_labels,
        t_labels=t_labels,
        y=y,
        d=d,
        mask=mask,
        unit_counts=counts,
    )


def load_panel(rows: Rows) -> PanelDataset:
    """Validate cell records and build a panel.

    Args:
        rows: Records with keys ``s, r, t, y, d``; a data frame, mappings
            or anything ``pandas`` can build a frame from.

    Returns:
        The validated dataset; cells absent from ``rows`` are masked out.

    Raises:
        EmptyInput: No rows.
        DuplicateCell: Two rows share an (s, r, t) key.
        NonBinaryTreatment: A treatment value outside {0, 1}.
    """
    frame = _to_frame(rows)
    _require_columns(frame, CELL_COLUMNS)
    frame = _integer_keys(frame[CELL_COLUMNS].copy())

    dup = frame.duplicated(KEYS, keep=False)
    if dup.any():
        row = frame.loc[dup].iloc[0]
        raise DuplicateCell(f"more than one row for (s={row['s']}, r={row['r']}, t={row['t']})")

    frame = _check_treatment(frame)
    frame = _check_outcome(frame)
    return _build_panel(frame)


def aggregate_cells(rows: Rows) -> PanelDataset:
    """Average individual observations into (s, r, t) cells.

    Each cell's outcome is the equal-weight mean of its members. N_sr (the
    number of distinct units per (s, r)) is kept on the dataset for
    optional N_sr-proportional weighting.

    Args:
        rows: Records with keys ``unit, s, r, t, y, d``.

    Returns:
        The aggregated dataset.

    Raises:
        MixedTreatmentInCell: Members of one cell disagree on treatment.
    """
    frame = _to_frame(rows)
    _require_columns(frame, ["unit"] + CELL_COLUMNS)
    frame = _integer_keys(frame[["unit"] + CELL_COLUMNS].copy())
    frame = _check_treatment(frame)
    frame = _check_outcome(frame)
    frame["unit"] = frame["unit"].astype(str)

    # Sorting first keeps float summation order independent of row order
    frame = frame.sort_values(KEYS + ["unit", "y"], kind="mergesort").reset_index(drop=True)

    grouped = frame.groupby(KEYS, sort=True)
    mixed = grouped["d"].nunique() > 1
    if mixed.any():
        s, r, t = mixed[mixed].index[0]
        raise MixedTreatmentInCell(f"cell (s={s}, r={r}, t={t}) mixes treated and control rows")

    cells = grouped.agg(y=("y", "mean"), d=("d", "first")).reset_index()
    unit_counts = frame.groupby(["s", "r"])["unit"].nunique()
    return _build_panel(cells, unit_counts)


def read_panel_csv(filepath: str) -> PanelDataset:
    """Read a panel CSV with header ``s,r,t,y,d`` or ``s,r,t,y,g``.

    With a ``g`` column the treatment is materialized as ``d = t >= g``;
    an empty ``g`` marks a never-treated series. A ``unit`` column marks
    individual rows, which are averaged into cells by ``aggregate_cells``.
    """
    try:
        frame = pd.read_csv(filepath, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise EmptyInput(f"{filepath} is empty") from None
    frame.columns = [str(c).strip() for c in frame.columns]

    if "d" not in frame.columns and "g" in frame.columns:
        _require_columns(frame, SCHEDULE_COLUMNS)
        g = pd.to_numeric(frame["g"], errors="coerce")
        t = pd.to_numeric(frame["t"], errors="coerce")
        frame["d"] = (g.notna() & (t >= g)).astype(int)
    if "unit" in frame.columns:
        return aggregate_cells(frame)
    return load_panel(frame)


def panel_to_frame(panel: PanelDataset) -> pd.DataFrame:
    """Flatten the present cells of a panel to ``s,r,t,y,d`` rows."""
    si, ri, ti = np.nonzero(panel.mask)
    return pd.DataFrame(
        {
            "s": np.asarray(panel.s_labels)[si],
            "r": np.asarray(panel.r_labels)[ri],
            "t": np.asarray(panel.t_labels)[ti],
            "y": panel.y[si, ri, ti],
            "d": panel.d[si, ri, ti].astype(int),
        }
    )


def save_panel_csv(filepath: str, panel: PanelDataset) -> None:
    """Write a panel in the ``s,r,t,y,d`` CSV format."""
    save_csv(filepath, panel_to_frame(panel))
