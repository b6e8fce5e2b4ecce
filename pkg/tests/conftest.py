"""Shared fixtures: the 2x2x2 worked example and seeded random staggered panels."""

import numpy as np
import pandas as pd
import pytest

from panel import PanelDataset, TreatmentSchedule, load_panel
from regression import triple_demean

# Y_srt of the worked example; only (s=1, r=1, t=2) is treated
TOY_Y = {
    (1, 1, 1): 1.0, (1, 1, 2): 5.0, (2, 1, 1): 2.0, (2, 1, 2): 3.0,
    (1, 2, 1): 0.0, (1, 2, 2): 1.0, (2, 2, 1): 4.0, (2, 2, 2): 4.0,
}


def toy_rows() -> list[dict]:
    return [
        {"s": s, "r": r, "t": t, "y": y, "d": int((s, r, t) == (1, 1, 2))}
        for (s, r, t), y in TOY_Y.items()
    ]


@pytest.fixture
def toy_panel() -> PanelDataset:
    return load_panel(toy_rows())


@pytest.fixture
def toy_frame() -> pd.DataFrame:
    return pd.DataFrame(toy_rows())


def panel_from_schedule(g: np.ndarray, y: np.ndarray) -> tuple[PanelDataset, TreatmentSchedule]:
    """Balanced panel labelled 1..S, 1..R, 1..T with d materialized from g."""
    S, R, T = y.shape
    schedule = TreatmentSchedule(g=np.asarray(g, dtype=np.int64), T=T)
    panel = PanelDataset(
        s_labels=tuple(range(1, S + 1)),
        r_labels=tuple(range(1, R + 1)),
        t_labels=tuple(range(1, T + 1)),
        y=np.asarray(y, dtype=float),
        d=schedule.treated().astype(np.int8),
        mask=np.ones((S, R, T), dtype=bool),
        unit_counts=np.ones((S, R), dtype=np.int64),
    )
    return panel, schedule


def random_staggered_panel(rng: np.random.Generator) -> tuple[PanelDataset, TreatmentSchedule]:
    """Random balanced staggered panel with S, R, T in 2..5 and identifying variation."""
    while True:
        S, R, T = (int(v) for v in rng.integers(2, 6, size=3))
        g = rng.integers(2, T + 2, size=(S, R))
        y = rng.standard_normal((S, R, T))
        panel, schedule = panel_from_schedule(g, y)
        if triple_demean(panel.d, panel).sum_of_squares() > 1e-6:
            return panel, schedule


@pytest.fixture(scope="session")
def random_panels() -> list[tuple[PanelDataset, TreatmentSchedule]]:
    rng = np.random.default_rng(20240601)
    return [random_staggered_panel(rng) for _ in range(50)]


@pytest.fixture
def make_panel():
    return panel_from_schedule
