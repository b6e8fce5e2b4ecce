"""Seeded panel generator with an exact truth table."""

import logging
import os
from typing import Optional

import numpy as np

import config
from panel import PanelDataset, TreatmentSchedule, save_panel_csv
from utils.errors import InvalidConfig
from utils.storage import save_csv, save_json
from .designs import named_design
from .models import DGPConfig, EffectLaw, NoiseModel, TrendModel, TruthTable, ViolationLaw

logger = logging.getLogger(__name__)


def _adoption(cfg: DGPConfig) -> np.ndarray:
    if cfg.adoption is None:
        return named_design(cfg.design, cfg.S, cfg.R, cfg.T, cfg.first_adoption, cfg.adoption_step)
    g = np.array([[cfg.T + 1 if v is None else v for v in row] for row in cfg.adoption])
    if g.shape != (cfg.S, cfg.R):
        raise InvalidConfig(f"adoption map has shape {g.shape}, expected ({cfg.S}, {cfg.R})")
    if ((g < 2) | (g > cfg.T + 1)).any():
        raise InvalidConfig(f"adoption periods must lie in 2..{cfg.T} (or be null for never)")
    return g


def _effects(cfg: DGPConfig, g: np.ndarray) -> dict[tuple[int, int, int], float]:
    """ATT_r(g, t) for every cohort present in the schedule, zero before g."""
    table = {(e.r, e.g, e.t): e.att for e in cfg.effect_table}
    att = {}
    for r in range(cfg.R):
        for cohort in sorted(set(g[:, r].tolist()) - {cfg.T + 1}):
            for t in range(1, cfg.T + 1):
                key = (r + 1, cohort, t)
                if t < cohort:
                    att[key] = 0.0
                elif cfg.effect == EffectLaw.TABLE:
                    if key not in table:
                        raise InvalidConfig(f"effect table has no entry for (r, g, t) = {key}")
                    att[key] = table[key]
                else:
                    value = cfg.effect_constant + cfg.stratum_gradient * r
                    if cfg.effect == EffectLaw.EVENT_TIME_LINEAR:
                        value += cfg.effect_slope * (t - cohort)
                    att[key] = value
    return att


def _violation(cfg: DGPConfig, g: np.ndarray) -> np.ndarray:
    """Trend departure m * (T + 1 - G) * (t - 1); earlier adopters drift faster."""
    periods = np.arange(cfg.T)[None, None, :]
    if cfg.violation == ViolationLaw.NONE:
        return np.zeros((cfg.S, cfg.R, cfg.T))
    if cfg.violation == ViolationLaw.COMMON:
        lead = (cfg.T + 1 - g.min(axis=1))[:, None, None]  # earliest adoption of unit s, any stratum
        return np.broadcast_to(cfg.violation_magnitude * lead * periods, (cfg.S, cfg.R, cfg.T)).copy()
    return cfg.violation_magnitude * (cfg.T + 1 - g)[:, :, None] * periods


def _noise(cfg: DGPConfig, rng: np.random.Generator) -> np.ndarray:
    shape = (cfg.S, cfg.R, cfg.T)
    if cfg.sigma == 0:
        return np.zeros(shape)
    if cfg.noise == NoiseModel.IID:
        return cfg.sigma * rng.standard_normal(shape)
    cell = rng.standard_normal(shape)
    shared_s = rng.standard_normal((cfg.S, 1, cfg.T))
    shared_r = rng.standard_normal((1, cfg.R, cfg.T))
    return cfg.sigma / np.sqrt(3.0) * (cell + shared_s + shared_r)


def gen_dgp(cfg: DGPConfig) -> tuple[PanelDataset, TreatmentSchedule, TruthTable]:
    """Generate a panel, its schedule and its true effects.

    Untreated outcomes are a_sr + b_st + c_rt plus the violation term, with
    b_st = phi_s + psi_t under the additive trend and an unrestricted
    standard normal draw under ``TrendModel.UNIT_TIME``. Fixed effects are
    drawn standard normal from the seed; treated
    cells add ATT_r(g, t), then noise is added.

    Raises:
        InvalidConfig: Adoption map or effect table inconsistent with S, R, T.
        UnknownDesign: Unknown named design.
    """
    g = _adoption(cfg)
    schedule = TreatmentSchedule(g=g.astype(np.int64), T=cfg.T)
    att = _effects(cfg, g)
    rng = np.random.default_rng(cfg.seed)

    a = rng.standard_normal((cfg.S, cfg.R))
    phi = rng.standard_normal(cfg.S)
    psi = rng.standard_normal(cfg.T)
    c = rng.standard_normal((cfg.R, cfg.T))
    b = phi[:, None] + psi[None, :]
    if cfg.trend == TrendModel.UNIT_TIME:
        b = rng.standard_normal((cfg.S, cfg.T))
    untreated = a[:, :, None] + b[:, None, :] + c[None, :, :]

    treated = schedule.treated()
    cell_effect = np.zeros(treated.shape)
    for s, r, t in np.argwhere(treated):
        cell_effect[s, r, t] = att[(r + 1, int(g[s, r]), t + 1)]
    violation = _violation(cfg, g)
    y = untreated + violation + cell_effect + _noise(cfg, rng)

    panel = PanelDataset(
        s_labels=tuple(range(1, cfg.S + 1)),
        r_labels=tuple(range(1, cfg.R + 1)),
        t_labels=tuple(range(1, cfg.T + 1)),
        y=y,
        d=treated.astype(np.int8),
        mask=np.ones(treated.shape, dtype=bool),
        unit_counts=np.ones((cfg.S, cfg.R), dtype=np.int64),
    )
    uniform = float(cell_effect[treated].mean()) if treated.any() else None
    truth = TruthTable(att=att, cell_effect=cell_effect, violation=violation, uniform_att=uniform)
    logger.debug(f"Generated {cfg.S}x{cfg.R}x{cfg.T} panel with {int(treated.sum())} treated cells")
    return panel, schedule, truth


def write_simulation(
    out_dir: str,
    panel: PanelDataset,
    truth: TruthTable,
    cfg: Optional[DGPConfig] = None,
) -> dict[str, str]:
    """Write panel.csv and truth.csv (plus the config as JSON when given); returns the paths."""
    paths = {
        "panel": os.path.join(out_dir, config.PANEL_FILE),
        "truth": os.path.join(out_dir, config.TRUTH_FILE),
    }
    save_panel_csv(paths["panel"], panel)
    save_csv(paths["truth"], truth.to_frame())
    if cfg is not None:
        paths["config"] = os.path.join(out_dir, config.DGP_FILE)
        save_json(paths["config"], cfg.model_dump(mode="json"))
    return paths
