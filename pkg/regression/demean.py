"""Triple-demeaning and the closed-form triple-differences regression coefficient."""

import numpy as np

import config
from panel import PanelDataset
from utils.errors import NoResidualTreatmentVariation, UnbalancedPanel
from .models import MeanField, ResidualField


def require_balanced(panel: PanelDataset, operation: str) -> None:
    if not panel.is_balanced:
        missing = int(panel.mask.size - panel.mask.sum())
        raise UnbalancedPanel(f"{operation} needs a balanced panel ({missing} cells missing)")


def mean_field(values: np.ndarray, panel: PanelDataset) -> MeanField:
    """Compute every one-, two- and three-way mean of a per-cell array.

    Args:
        values: Array of shape (S, R, T).
        panel: Balanced dataset the array lives on.

    Returns:
        The means, named by the indices they keep.
    """
    require_balanced(panel, "mean_field")
    v = np.asarray(values, dtype=float)
    return MeanField(
        sr=v.mean(axis=2),
        st=v.mean(axis=1),
        rt=v.mean(axis=0),
        s=v.mean(axis=(1, 2)),
        r=v.mean(axis=(0, 2)),
        t=v.mean(axis=(0, 1)),
        grand=float(v.mean()),
    )


def triple_demean(values: np.ndarray, panel: PanelDataset) -> ResidualField:
    """Residualize a per-cell array on the (s,r), (s,t) and (r,t) fixed effects.

    value - mean_sr - mean_st - mean_rt + mean_s + mean_r + mean_t - grand,
    which on a balanced grid is the exact projection residual.

    Raises:
        UnbalancedPanel: The panel has missing cells.
    """
    m = mean_field(values, panel)
    v = np.asarray(values, dtype=float)
    residual = (
        v
        - m.sr[:, :, None]
        - m.st[:, None, :]
        - m.rt[None, :, :]
        + m.s[:, None, None]
        + m.r[None, :, None]
        + m.t[None, None, :]
        - m.grand
    )
    return ResidualField(values=residual)


def tdr_estimate(panel: PanelDataset) -> float:
    """Triple-differences regression coefficient via triple-demeaning.

    tau = (sum over treated cells of demeaned y) / (sum of squared demeaned d).

    Raises:
        UnbalancedPanel: The panel has missing cells.
        NoResidualTreatmentVariation: The demeaned treatment is identically zero.
    """
    d_tilde = triple_demean(panel.d, panel)
    denominator = d_tilde.sum_of_squares()
    if denominator <= config.DEGENERATE_TOL:
        raise NoResidualTreatmentVariation(
            "treatment has no variation left after removing the fixed effects"
        )
    y_tilde = triple_demean(panel.y, panel)
    numerator = float(np.sum(y_tilde.values[panel.d == 1]))
    return numerator / denominator
