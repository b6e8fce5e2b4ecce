"""Data models for panel cells and treatment schedules."""

from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class StaggerPolicy(str, Enum):
    """How ``filter_to_staggered`` reacts to a treatment reversal."""
    DROP_PREFIX = "drop-offending-prefix"
    ERROR = "error"


class IndividualRow(BaseModel):
    """Raw observation before aggregation to (s, r, t) cells."""
    unit: str
    s: int
    r: int
    t: int
    y: float
    d: int


class PanelDataset(BaseModel):
    """Grid of (s, r, t) cells holding outcome and treatment.

    Arrays are indexed ``[s, r, t]`` by position; the integer keys the data
    were supplied with live in ``s_labels``, ``r_labels`` and ``t_labels``.
    Time labels form a consecutive integer range, so internal period
    ``p`` (1-based) corresponds to label ``t_labels[0] + p - 1``. Missing
    cells have ``mask`` False, ``y`` NaN and ``d`` 0.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    s_labels: tuple[int, ...]
    r_labels: tuple[int, ...]
    t_labels: tuple[int, ...]
    y: np.ndarray
    d: np.ndarray
    mask: np.ndarray
    unit_counts: np.ndarray = Field(description="N_sr, individual units per (s, r)")

    @model_validator(mode="after")
    def _check_arrays(self) -> "PanelDataset":
        shape = (len(self.s_labels), len(self.r_labels), len(self.t_labels))
        for name in ("y", "d", "mask"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if self.unit_counts.shape != shape[:2]:
            raise ValueError(f"unit_counts has shape {self.unit_counts.shape}, expected {shape[:2]}")
        if not np.isin(self.d[self.mask], (0, 1)).all():
            raise ValueError("treatment must be 0 or 1 on present cells")
        for arr in (self.y, self.d, self.mask, self.unit_counts):
            arr.flags.writeable = False
        return self

    @property
    def S(self) -> int:
        return len(self.s_labels)

    @property
    def R(self) -> int:
        return len(self.r_labels)

    @property
    def T(self) -> int:
        return len(self.t_labels)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.S, self.R, self.T

    @property
    def never(self) -> int:
        """Internal never-treated sentinel, one past the last period."""
        return self.T + 1

    @property
    def is_balanced(self) -> bool:
        return bool(self.mask.all())

    @property
    def periods(self) -> np.ndarray:
        """Internal 1-based period numbers."""
        return np.arange(1, self.T + 1)

    def s_index(self, label: int) -> int:
        return self._index(self.s_labels, label, "s")

    def r_index(self, label: int) -> int:
        return self._index(self.r_labels, label, "r")

    def period(self, t_label: int) -> int:
        """Convert a time label (or a cohort label up to one past the end) to an internal period."""
        p = int(t_label) - self.t_labels[0] + 1
        if not 1 <= p <= self.T + 1:
            raise ValueError(f"time {t_label} outside the panel's range")
        return p

    def t_label(self, period: int) -> int:
        """Convert an internal period (never sentinel included) back to a time label."""
        return self.t_labels[0] + int(period) - 1

    def cell_weights(self, proportional: bool = False) -> np.ndarray:
        """Per-cell regression weights.

        Args:
            proportional: Weight each cell by N_sr, reproducing the
                individual-level regression; otherwise all ones.

        Returns:
            Array of shape (S, R, T), zero on missing cells.
        """
        base = self.unit_counts[:, :, None] if proportional else np.ones((self.S, self.R, 1))
        return np.broadcast_to(base, self.shape) * self.mask

    def replace(self, **changes) -> "PanelDataset":
        """Return a copy with some fields replaced (arrays are copied)."""
        fields = {
            "s_labels": self.s_labels,
            "r_labels": self.r_labels,
            "t_labels": self.t_labels,
            "y": self.y.copy(),
            "d": self.d.copy(),
            "mask": self.mask.copy(),
            "unit_counts": self.unit_counts.copy(),
        }
        fields.update(changes)
        return PanelDataset(**fields)

    @staticmethod
    def _index(labels: tuple[int, ...], label: int, axis: str) -> int:
        try:
            return labels.index(int(label))
        except ValueError:
            raise ValueError(f"unknown {axis} key {label}") from None


class TreatmentSchedule(BaseModel):
    """Per-(s, r) treatment initiation period G_sr.

    ``g`` holds internal 1-based periods; never-treated series carry the
    sentinel ``T + 1``.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    g: np.ndarray
    T: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_periods(self) -> "TreatmentSchedule":
        if self.g.ndim != 2:
            raise ValueError("schedule must be an (S, R) array")
        if ((self.g < 2) | (self.g > self.T + 1)).any():
            raise ValueError("initiation periods must lie in 2..T or be the never sentinel")
        self.g.flags.writeable = False
        return self

    @property
    def never(self) -> int:
        return self.T + 1

    @property
    def never_treated(self) -> np.ndarray:
        return self.g == self.never

    def treated(self) -> np.ndarray:
        """Boolean (S, R, T) array, True where period >= G_sr."""
        periods = np.arange(1, self.T + 1)
        return periods[None, None, :] >= self.g[:, :, None]

    def cohort(self, r: int, g: int) -> np.ndarray:
        """Positions s with G_sr == g in stratum position ``r``."""
        return np.flatnonzero(self.g[:, r] == g)

    def cohorts(self, r: Optional[int] = None) -> list[int]:
        """Distinct treated initiation periods, optionally within one stratum."""
        g = self.g if r is None else self.g[:, r]
        return sorted(int(v) for v in np.unique(g) if v != self.never)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TreatmentSchedule):
            return NotImplemented
        return self.T == other.T and np.array_equal(self.g, other.g)
