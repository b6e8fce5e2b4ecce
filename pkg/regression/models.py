"""Data models for demeaning and fixed-effects fits."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict


class MeanField(BaseModel):
    """One-way, two-way and grand means of a per-cell array."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sr: np.ndarray  # (S, R)
    st: np.ndarray  # (S, T)
    rt: np.ndarray  # (R, T)
    s: np.ndarray  # (S,)
    r: np.ndarray  # (R,)
    t: np.ndarray  # (T,)
    grand: float


class ResidualField(BaseModel):
    """Triple-demeaned per-cell values."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray  # (S, R, T)

    def __getitem__(self, key):
        return self.values[key]

    def sum_of_squares(self) -> float:
        return float(np.sum(self.values ** 2))


class FEFit(BaseModel):
    """Weighted least-squares fit of the three-way fixed-effects model.

    ``fixed_effects`` holds alpha_sr + gamma_st + delta_rt on ``anchored``
    cells and NaN elsewhere. A cell is anchored when all three of its groups
    carry positive subset weight and its value is the same for every
    least-squares solution.
    ``fitted`` adds ``tau * d`` when the treatment was included.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    fixed_effects: np.ndarray
    fitted: np.ndarray
    anchored: np.ndarray
    subset: np.ndarray
    tau: Optional[float] = None
    iterations: int
    final_change: float

    def unanchored(self, requested: np.ndarray) -> np.ndarray:
        """Positions (s, r, t) of requested cells whose prediction is not anchored."""
        return np.argwhere(requested & ~self.anchored)

    def residuals(self, values: np.ndarray) -> np.ndarray:
        """values - fitted on the fitting subset, zero elsewhere."""
        return np.where(self.subset, values - np.nan_to_num(self.fitted), 0.0)
