"""Enumerate, classify and sum the comparisons behind the regression coefficient."""

import logging
from collections.abc import Iterator
from typing import Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

import config
from panel import PanelDataset, TreatmentSchedule, derive_schedule
from regression import require_balanced, tdr_estimate, triple_demean
from utils.errors import DegenerateDesign, InputError, TripDiffError, TupleCapExceeded
from utils.storage import ensure_parent_dir
from .models import CategorySummary, DecompositionReport, TermCategory, TermRecord, TreatedCounts
from .patterns import CATEGORIES, CATEGORY_INDEX, CATEGORY_TABLE, CONTRIBUTING, FLIPPED, code_pattern

logger = logging.getLogger(__name__)

# Fixed block size keeps the summation order independent of the thread count
ANCHOR_BLOCK = 64

TERM_COLUMNS = ["s", "s2", "t", "t2", "r", "r2", "category", "primary_did", "placebo_did", "value"]


def _treatment(panel: PanelDataset, schedule: Optional[TreatmentSchedule]) -> np.ndarray:
    """Treatment array implied by the schedule, checked against the panel."""
    if schedule is None:
        schedule = derive_schedule(panel)
    d = (schedule.treated() & panel.mask).astype(np.int64)
    if not np.array_equal(d, panel.d):
        raise InputError("schedule does not reproduce the panel's treatment column")
    return d


def treated_counts(d: np.ndarray) -> TreatedCounts:
    """N and its one- and two-way marginal counts of treated cells."""
    return TreatedCounts(
        total=int(d.sum()),
        sr=d.sum(axis=2).tolist(),
        st=d.sum(axis=1).tolist(),
        rt=d.sum(axis=0).tolist(),
        s=d.sum(axis=(1, 2)).tolist(),
        r=d.sum(axis=(0, 2)).tolist(),
        t=d.sum(axis=(0, 1)).tolist(),
    )


def _omega(d: np.ndarray) -> float:
    S, R, T = d.shape
    n = float(d.sum())
    sq = lambda axis: float(np.sum(d.sum(axis=axis).astype(float) ** 2))  # noqa: E731
    return (
        S * R * T * n
        - S * R * sq(2)
        - S * T * sq(1)
        - R * T * sq(0)
        + T * sq((0, 1))
        + R * sq((0, 2))
        + S * sq((1, 2))
        - n ** 2
    )


def normalizer(schedule: TreatmentSchedule, panel: PanelDataset) -> float:
    """Normalizing constant omega from the treated-cell counts.

    omega = SRT N - SR sum N_sr^2 - ST sum N_st^2 - RT sum N_rt^2
            + T sum N_t^2 + R sum N_r^2 + S sum N_s^2 - N^2,
    which equals SRT times the residual sum of squares of d.
    """
    require_balanced(panel, "normalizer")
    return _omega(_treatment(panel, schedule))


def _anchor_arrays(y: np.ndarray, d: np.ndarray, s: int, r: int, t: int):
    """Pattern codes and DiD values for every (s2, r2, t2) given one treated anchor.

    Returns (codes, primary, placebo, keep) on the (S, R, T) grid of
    (s2, r2, t2); ``keep`` excludes the diagonal s2 == s, t2 == t and r2 == r.
    """
    S, R, T = y.shape
    code = (
        (1 << 7)
        | (d[:, r, t][:, None, None] << 6)
        | (d[s, r, :][None, None, :] << 5)
        | (d[:, r, :][:, None, :] << 4)
        | (d[s, :, t][None, :, None] << 3)
        | (d[:, :, t][:, :, None] << 2)
        | (d[s, :, :][None, :, :] << 1)
        | d
    )
    primary = (y[s, r, t] - y[:, r, t][:, None] - y[s, r, :][None, :] + y[:, r, :])[:, None, :]
    placebo = y[s, :, t][None, :, None] - y[:, :, t][:, :, None] - y[s, :, :][None, :, :] + y
    keep = (
        (np.arange(S) != s)[:, None, None]
        & (np.arange(R) != r)[None, :, None]
        & (np.arange(T) != t)[None, None, :]
    )
    return code, np.broadcast_to(primary, y.shape), placebo, keep


def _accumulate(y: np.ndarray, d: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """Per-category [terms, sum, |sum|, double-counted sum] over a block of anchors."""
    k = len(CATEGORIES)
    totals = np.zeros((4, k))
    for s, r, t in anchors:
        code, primary, placebo, keep = _anchor_arrays(y, d, s, r, t)
        idx = CATEGORY_INDEX[code[keep]]
        value = (primary - placebo)[keep]
        double = np.where(FLIPPED[idx], 2.0 * primary[keep], value)
        totals[0] += np.bincount(idx, minlength=k)
        totals[1] += np.bincount(idx, weights=value, minlength=k)
        totals[2] += np.bincount(idx, weights=np.abs(value), minlength=k)
        totals[3] += np.bincount(idx, weights=double, minlength=k)
    return totals


def _check_cap(panel: PanelDataset, n_treated: int, tuple_cap: int) -> None:
    tuples = n_treated * panel.S * panel.T * panel.R
    if tuples > tuple_cap:
        raise TupleCapExceeded(
            f"full enumeration needs {tuples:,} tuples, above the cap of {tuple_cap:,} "
            "(raise TRIPDIFF_TUPLE_CAP or --tuple-cap to proceed)"
        )


def enumerate_terms(
    panel: PanelDataset,
    schedule: Optional[TreatmentSchedule] = None,
    tuple_cap: int = config.TUPLE_CAP,
) -> Iterator[TermRecord]:
    """Yield every contributing comparison anchored on a treated cell.

    Tuples with s2 == s or t2 == t are skipped (their values are zero), as
    are vanishing and staggering-excluded patterns.

    Raises:
        UnbalancedPanel: The panel has missing cells.
        TupleCapExceeded: Enumeration would exceed ``tuple_cap`` tuples.
    """
    require_balanced(panel, "enumerate_terms")
    d = _treatment(panel, schedule)
    _check_cap(panel, int(d.sum()), tuple_cap)
    y = panel.y
    s_lab, r_lab, t_lab = panel.s_labels, panel.r_labels, panel.t_labels

    for s, r, t in np.argwhere(d == 1):
        code, primary, placebo, keep = _anchor_arrays(y, d, s, r, t)
        contributing = keep & CONTRIBUTING[CATEGORY_INDEX[code]]
        for s2, r2, t2 in np.argwhere(contributing):
            c = int(code[s2, r2, t2])
            category = CATEGORY_TABLE[c]
            p, q = float(primary[s2, r2, t2]), float(placebo[s2, r2, t2])
            yield TermRecord(
                s=s_lab[s], s2=s_lab[s2], t=t_lab[t], t2=t_lab[t2], r=r_lab[r], r2=r_lab[r2],
                pattern=code_pattern(c),
                category=category,
                primary_did=p,
                placebo_did=q,
                value=p - q,
                double_counted=2.0 * p if category.flipped else p - q,
            )


def decompose(
    panel: PanelDataset,
    schedule: Optional[TreatmentSchedule] = None,
    tuple_cap: int = config.TUPLE_CAP,
    n_jobs: int = 1,
) -> DecompositionReport:
    """Decompose the regression coefficient into categorized comparisons.

    Anchors are split into blocks that may run on parallel threads; block
    totals are merged in anchor order, so the report does not depend on
    scheduling.

    Args:
        panel: Balanced dataset.
        schedule: Treatment schedule; derived from the panel when omitted.
        tuple_cap: Enumeration guard.
        n_jobs: Worker threads.

    Returns:
        The report, with the reconstruction checked against the regression.

    Raises:
        DegenerateDesign: omega is (numerically) zero.
        TupleCapExceeded: The panel is too large to enumerate.
    """
    require_balanced(panel, "decompose")
    d = _treatment(panel, schedule)
    omega = _omega(d)
    if omega <= config.DEGENERATE_TOL:
        raise DegenerateDesign(f"normalizer omega = {omega:.3g}; the design has no identifying variation")
    n_treated = int(d.sum())
    _check_cap(panel, n_treated, tuple_cap)

    anchors = np.argwhere(d == 1)
    blocks = np.array_split(anchors, -(-len(anchors) // ANCHOR_BLOCK))
    parts = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_accumulate)(panel.y, d, block) for block in blocks
    )
    totals = np.sum(parts, axis=0)

    categories = {
        category: CategorySummary(
            terms=int(totals[0, i]),
            sum=float(totals[1, i]),
            weight_mass=float(totals[2, i] / omega),
        )
        for i, category in enumerate(CATEGORIES)
        if category.contributes
    }
    contributing_sum = float(totals[1, CONTRIBUTING].sum())
    tau_reconstructed = contributing_sum / omega
    tau_regression = tdr_estimate(panel)

    S, R, T = panel.shape
    report = DecompositionReport(
        omega=omega,
        counts=treated_counts(d),
        categories=categories,
        total_weight_mass=float(totals[2, CONTRIBUTING].sum() / omega),
        tau_reconstructed=tau_reconstructed,
        tau_regression=tau_regression,
        skipped_diagonal=n_treated * (R - 1) * (S + T - 1),
        flipped_value_sum=float(totals[1, FLIPPED].sum()),
        flipped_double_counted_sum=float(totals[3, FLIPPED].sum()),
        vanishing_sum=float(totals[1, CATEGORIES.index(TermCategory.VANISHING)]),
        omega_check=S * R * T * triple_demean(d, panel).sum_of_squares(),
    )

    gap = abs(tau_reconstructed - tau_regression)
    if gap > config.RECONSTRUCTION_TOL * max(1.0, abs(tau_regression)):
        raise TripDiffError(f"reconstruction differs from the regression coefficient by {gap:.3g}")
    logger.debug(f"Decomposition of {n_treated} anchors: tau {tau_reconstructed:.6g}, omega {omega:.6g}")
    return report


def summarize_report(report: DecompositionReport) -> dict[str, float]:
    """Share of comparison mass on clean versus contaminated comparisons."""
    total = report.total_weight_mass
    contaminated = report.contaminated_mass()
    clean = report.categories[TermCategory.VALID_VALID].weight_mass
    return {
        "clean_mass": clean,
        "contaminated_mass": contaminated,
        "contaminated_share": contaminated / total if total > 0 else 0.0,
        "clean_contribution": report.categories[TermCategory.VALID_VALID].sum / report.omega,
        "contaminated_contribution": sum(
            c.sum for k, c in report.categories.items() if k.contaminated
        ) / report.omega,
    }


def save_terms_csv(
    filepath: str,
    panel: PanelDataset,
    schedule: Optional[TreatmentSchedule] = None,
    tuple_cap: int = config.TUPLE_CAP,
    chunk_size: int = 100_000,
) -> int:
    """Stream the term dump to CSV in chunks; returns the number of rows written."""
    ensure_parent_dir(filepath)
    written = 0
    buffer: list[dict] = []

    def flush(first: bool) -> None:
        frame = pd.DataFrame(buffer, columns=TERM_COLUMNS)
        frame.to_csv(filepath, mode="w" if first else "a", header=first, index=False, float_format="%.12g")

    first = True
    for record in enumerate_terms(panel, schedule, tuple_cap):
        row = record.model_dump(include=set(TERM_COLUMNS))
        row["category"] = record.category.value
        buffer.append(row)
        if len(buffer) >= chunk_size:
            flush(first)
            written += len(buffer)
            buffer, first = [], False
    if buffer or first:
        flush(first)
        written += len(buffer)
    return written
