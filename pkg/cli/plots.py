"""Static SVG rendering of event-study curves and adoption patterns."""

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402
from matplotlib.patches import Patch  # noqa: E402

from imputation import EventStudyCurve  # noqa: E402
from panel import PanelDataset, TreatmentSchedule  # noqa: E402
from utils.storage import ensure_parent_dir  # noqa: E402


def _segment(points, color: str, label: str, ax) -> None:
    shown = [p for p in points if p.estimate is not None]
    if not shown:
        return
    k = [p.k for p in shown]
    ax.plot(k, [p.estimate for p in shown], "o-", color=color, label=label)
    banded = [p for p in shown if p.ci_lo is not None and p.ci_hi is not None]
    if banded:
        ax.fill_between(
            [p.k for p in banded],
            [p.ci_lo for p in banded],
            [p.ci_hi for p in banded],
            color=color,
            alpha=0.2,
        )


def plot_event_study(curve: EventStudyCurve, filepath: str, title: str = "Event study") -> None:
    """Save the curve as SVG, placebo lags and post-treatment points in separate colors."""
    ensure_parent_dir(filepath)
    with plt.rc_context({"svg.hashsalt": "tripdiff"}):
        fig, ax = plt.subplots(figsize=(8, 5))
        _segment([p for p in curve.points if p.is_placebo], "gray", "Placebo (held out)", ax)
        _segment([p for p in curve.points if not p.is_placebo], "tab:blue", "Post-treatment", ax)
        ax.axhline(y=0, color="black", linestyle="--", alpha=0.7)
        ax.axvline(x=-0.5, color="red", linestyle=":", alpha=0.7)
        ax.set_xlabel("Periods relative to treatment")
        ax.set_ylabel("Estimated effect")
        ax.set_title(title)
        ax.set_xticks([p.k for p in curve.points])
        ax.grid(True, alpha=0.3)
        if ax.get_legend_handles_labels()[0]:
            ax.legend()
        fig.tight_layout()
        fig.savefig(filepath, format="svg", metadata={"Date": None})
        plt.close(fig)


ADOPTION_STATES = ("missing", "control", "treated")


def adoption_grid(panel: PanelDataset, schedule: TreatmentSchedule) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Cell states (0 missing, 1 control, 2 treated) with one row per (s, r) series.

    Rows are ordered by adoption period, never-treated series last, then by
    s and r. Returns the grid and the (s, r) labels of its rows.
    """
    order = sorted((int(schedule.g[s, r]), s, r) for s in range(panel.S) for r in range(panel.R))
    states = np.where(panel.mask, 1 + (panel.d == 1), 0)
    grid = np.array([states[s, r] for _, s, r in order], dtype=np.int64)
    labels = [(panel.s_labels[s], panel.r_labels[r]) for _, s, r in order]
    return grid, labels


def plot_adoption(panel: PanelDataset, schedule: TreatmentSchedule, filepath: str,
                  title: str = "Treatment adoption") -> None:
    """Save the staggering and missingness of the panel as an SVG heatmap."""
    grid, labels = adoption_grid(panel, schedule)
    ensure_parent_dir(filepath)
    with plt.rc_context({"svg.hashsalt": "tripdiff"}):
        fig, ax = plt.subplots(figsize=(8, max(3.0, 0.25 * len(labels) + 1.5)))
        cmap = ListedColormap(["white", "lightgray", "tab:red"])
        ax.imshow(grid, cmap=cmap, vmin=0, vmax=2, aspect="auto", interpolation="nearest")
        ax.set_xticks(range(panel.T))
        ax.set_xticklabels([str(t) for t in panel.t_labels])
        if len(labels) <= 60:
            ax.set_yticks(range(len(labels)))
            ax.set_yticklabels([f"s={s}, r={r}" for s, r in labels])
        ax.set_xlabel("Period")
        ax.set_ylabel("Series (by adoption period)")
        ax.set_title(title)
        ax.legend(
            handles=[Patch(facecolor=c, edgecolor="black", label=state)
                     for c, state in zip(cmap.colors, ADOPTION_STATES)],
            loc="upper left", bbox_to_anchor=(1.01, 1.0),
        )
        fig.tight_layout()
        fig.savefig(filepath, format="svg", metadata={"Date": None})
        plt.close(fig)
