"""Dense dummy-variable least squares for the three-way fixed-effects regression."""

from typing import Optional

import numpy as np
import scipy.linalg

from panel import PanelDataset
from utils.errors import SingularDesign


def design_matrix(panel: PanelDataset) -> np.ndarray:
    """Full dummy expansion over present cells, treatment column first.

    Columns: d; alpha_sr for every (s, r); gamma_st for t >= 2; delta_rt for
    r >= 2 and t >= 2. The dropped columns are the reference cells that make
    the three groups jointly full rank.
    """
    S, R, T = panel.shape
    si, ri, ti = np.nonzero(panel.mask)
    n = si.size

    alpha = np.zeros((n, S * R))
    alpha[np.arange(n), si * R + ri] = 1.0

    gamma = np.zeros((n, S * (T - 1)))
    rows = ti > 0
    gamma[np.flatnonzero(rows), si[rows] * (T - 1) + ti[rows] - 1] = 1.0

    delta = np.zeros((n, (R - 1) * (T - 1)))
    rows = (ri > 0) & (ti > 0)
    delta[np.flatnonzero(rows), (ri[rows] - 1) * (T - 1) + ti[rows] - 1] = 1.0

    d = panel.d[si, ri, ti].astype(float)[:, None]
    return np.hstack([d, alpha, gamma, delta])


def dense_ols_oracle(panel: PanelDataset, cell_weights: Optional[np.ndarray] = None) -> float:
    """Coefficient on d from the normal equations of the dummy-encoded regression.

    Args:
        panel: The dataset; missing cells are left out of the regression.
        cell_weights: Optional nonnegative per-cell weights (weighted least squares).

    Returns:
        The estimated tau.

    Raises:
        SingularDesign: The design matrix is rank deficient, e.g. no
            treatment variation or a treatment collinear with the fixed effects.
    """
    X = design_matrix(panel)
    y = panel.y[panel.mask]
    if cell_weights is not None:
        w = np.broadcast_to(np.asarray(cell_weights, dtype=float), panel.shape)[panel.mask]
        root = np.sqrt(w)[:, None]
        X = X * root
        y = y * root[:, 0]

    rank = np.linalg.matrix_rank(X)
    if rank < X.shape[1]:
        raise SingularDesign(f"design matrix has rank {rank} < {X.shape[1]} columns")

    coef = scipy.linalg.solve(X.T @ X, X.T @ y, assume_a="pos")
    return float(coef[0])
