"""Subcommand implementations. Each returns a process exit code."""

import logging
import os
import sys
from collections.abc import Callable
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

import config
from decomposition import decompose, save_terms_csv, summarize_report
from identification import EstimatorTag, aggregate_atts, group_time_effects
from imputation import EventStudyCurve, event_study_curve, impute_counterfactuals, imputation_att
from inference import BootstrapSummary, bootstrap, bootstrap_vector
from panel import PanelDataset, TreatmentSchedule, derive_schedule, read_panel_csv
from regression import tdr_estimate, weighted_tdr_estimate
from simulate import DGPConfig, gen_dgp, write_simulation
from utils.errors import TripDiffError
from utils.storage import load_json, save_csv, save_json
from .models import CellWeighting, RunConfig
from .plots import plot_adoption, plot_event_study

logger = logging.getLogger(__name__)

EFFECT_COLUMNS = ["r", "g", "t", "estimate", "n_treated", "n_comparison", "estimator"]
EVENT_STUDY_COLUMNS = ["k", "estimate", "n", "ci_lo", "ci_hi"]


def _path(cfg: RunConfig, filename: str) -> str:
    return os.path.join(cfg.out, filename)


def _load(cfg: RunConfig) -> tuple[PanelDataset, TreatmentSchedule]:
    panel = read_panel_csv(cfg.input)
    return panel, derive_schedule(panel)


def _write_manifest(cfg: RunConfig, outputs: list[str]) -> None:
    save_json(_path(cfg, config.RUN_MANIFEST_FILE), {
        "config": cfg.model_dump(mode="json"),
        "seed": cfg.seed,
        "outputs": outputs,
    })


def _adoption_plot(cfg: RunConfig, panel: PanelDataset, schedule: TreatmentSchedule) -> list[str]:
    if not cfg.adoption_plot:
        return []
    plot_adoption(panel, schedule, _path(cfg, config.ADOPTION_PLOT_FILE))
    return [config.ADOPTION_PLOT_FILE]


def run_command(command: Callable[[RunConfig], int], cfg: RunConfig) -> int:
    """Run a subcommand, mapping failures to exit codes with the error name on stderr."""
    try:
        return command(cfg)
    except TripDiffError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f"InvalidConfig: {e}", file=sys.stderr)
        return config.EXIT_INPUT
    except OSError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return config.EXIT_INPUT


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------

def _regression_estimate(panel: PanelDataset, cell_weights: Optional[np.ndarray] = None) -> float:
    if cell_weights is None and panel.is_balanced:
        return tdr_estimate(panel)
    return weighted_tdr_estimate(panel, cell_weights)


def _triple_diff_att(panel: PanelDataset, schedule: TreatmentSchedule, cfg: RunConfig,
                     cell_weights: Optional[np.ndarray] = None) -> float:
    effects = group_time_effects(
        panel, schedule, EstimatorTag.PROP2, cfg.t_star, cfg.comparison, cell_weights
    )
    return aggregate_atts(effects, cfg.weighting)


def _base_weights(panel: PanelDataset, cfg: RunConfig) -> Optional[np.ndarray]:
    if cfg.cell_weights == CellWeighting.N_SR:
        return panel.cell_weights(proportional=True)
    return None


def _estimate_table(summaries: dict[str, dict[str, BootstrapSummary]]) -> pd.DataFrame:
    """One row per estimator with se and interval columns per bootstrap scheme."""
    rows: dict[str, dict] = {}
    for scheme, by_estimator in summaries.items():
        for name, summary in by_estimator.items():
            row = rows.setdefault(name, {"estimator": name, "estimate": summary.estimate})
            row[f"se_{scheme}"] = summary.se
            row[f"ci_lo_{scheme}"] = summary.ci_lo
            row[f"ci_hi_{scheme}"] = summary.ci_hi
    return pd.DataFrame(list(rows.values()))


def cmd_estimate(cfg: RunConfig) -> int:
    """Regression coefficient next to the imputation and triple-difference aggregates."""
    panel, schedule = _load(cfg)
    base = _base_weights(panel, cfg)
    imputed = impute_counterfactuals(panel, schedule, base)
    effects = group_time_effects(panel, schedule, EstimatorTag.PROP2, cfg.t_star, cfg.comparison, base)

    report = {
        "tdr_estimate": _regression_estimate(panel, base),
        "imputation_att": imputation_att(panel, schedule, cfg.weighting, base),
        "triple_diff_att": aggregate_atts(effects, cfg.weighting) if effects else None,
        "weighting": cfg.weighting.value,
        "cell_weights": cfg.cell_weights.value,
        "n_imputed": len(imputed.effects),
        "n_dropped": len(imputed.dropped),
        "n_group_time_effects": len(effects),
    }

    outputs = [config.ESTIMATE_FILE, config.EFFECTS_FILE]
    boots = cfg.bootstrap_configs()
    if boots:
        scale = 1.0 if base is None else base
        estimators = {
            "tdr_estimate": lambda w: _regression_estimate(panel, w * scale),
            "imputation_att": lambda w: imputation_att(panel, schedule, cfg.weighting, w * scale),
        }
        if effects:
            estimators["triple_diff_att"] = lambda w: _triple_diff_att(panel, schedule, cfg, w * scale)
        summaries = {
            boot.scheme.value: {name: bootstrap(panel, fn, boot, cfg.threads) for name, fn in estimators.items()}
            for boot in boots
        }
        report["bootstrap"] = {
            scheme: {name: summary.to_report() for name, summary in by_estimator.items()}
            for scheme, by_estimator in summaries.items()
        }
        save_csv(_path(cfg, config.ESTIMATE_TABLE_FILE), _estimate_table(summaries))
        outputs.append(config.ESTIMATE_TABLE_FILE)

    save_json(_path(cfg, config.ESTIMATE_FILE), report)
    frame = pd.DataFrame([e.model_dump(include=set(EFFECT_COLUMNS)) for e in effects], columns=EFFECT_COLUMNS)
    frame["estimator"] = frame["estimator"].map(lambda tag: getattr(tag, "value", tag))
    save_csv(_path(cfg, config.EFFECTS_FILE), frame)
    outputs += _adoption_plot(cfg, panel, schedule)
    _write_manifest(cfg, outputs)
    return config.EXIT_OK


# ---------------------------------------------------------------------------
# decompose
# ---------------------------------------------------------------------------

def cmd_decompose(cfg: RunConfig) -> int:
    """Decomposition report, plus the term dump when requested."""
    panel, schedule = _load(cfg)
    report = decompose(panel, schedule, cfg.tuple_cap, n_jobs=cfg.threads)
    document = report.model_dump(mode="json")
    document["summary"] = summarize_report(report)

    outputs = [config.DECOMPOSITION_FILE]
    save_json(_path(cfg, config.DECOMPOSITION_FILE), document)
    if cfg.term_dump:
        rows = save_terms_csv(_path(cfg, config.TERMS_FILE), panel, schedule, cfg.tuple_cap)
        logger.info(f"Wrote {rows} terms to {config.TERMS_FILE}")
        outputs.append(config.TERMS_FILE)
    outputs += _adoption_plot(cfg, panel, schedule)
    _write_manifest(cfg, outputs)
    return config.EXIT_OK


# ---------------------------------------------------------------------------
# event-study
# ---------------------------------------------------------------------------

def _curve_values(curve: EventStudyCurve) -> np.ndarray:
    return np.array([np.nan if p.estimate is None else p.estimate for p in curve.points])


def cmd_event_study(cfg: RunConfig) -> int:
    """Event-study curve with held-out placebo lags, as CSV and SVG."""
    panel, schedule = _load(cfg)
    curve = event_study_curve(panel, schedule, cfg.max_pre, cfg.max_post, cfg.placebo_scope)

    boot = cfg.bootstrap_config()
    if boot is not None:
        def estimator(w: np.ndarray) -> np.ndarray:
            return _curve_values(event_study_curve(panel, schedule, cfg.max_pre, cfg.max_post, cfg.placebo_scope, w))

        band = bootstrap_vector(panel, estimator, boot, cfg.threads)
        curve = EventStudyCurve(points=[
            p.model_copy(update={"ci_lo": lo, "ci_hi": hi})
            for p, lo, hi in zip(curve.points, band.ci_lo, band.ci_hi)
        ])

    frame = pd.DataFrame([p.model_dump(include=set(EVENT_STUDY_COLUMNS)) for p in curve.points],
                         columns=EVENT_STUDY_COLUMNS)
    save_csv(_path(cfg, config.EVENT_STUDY_FILE), frame)
    plot_event_study(curve, _path(cfg, config.EVENT_STUDY_PLOT_FILE))
    outputs = [config.EVENT_STUDY_FILE, config.EVENT_STUDY_PLOT_FILE] + _adoption_plot(cfg, panel, schedule)
    _write_manifest(cfg, outputs)
    return config.EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _dgp_config(cfg: RunConfig) -> DGPConfig:
    if cfg.dgp_config and not os.path.exists(cfg.dgp_config):
        raise FileNotFoundError(f"DGP config {cfg.dgp_config} not found")
    settings = load_json(cfg.dgp_config) if cfg.dgp_config else {}
    settings["seed"] = cfg.seed
    if cfg.design is not None:
        settings["design"] = cfg.design
    return DGPConfig(**settings)


def cmd_simulate(cfg: RunConfig) -> int:
    """Simulated panel and its truth table."""
    dgp = _dgp_config(cfg)
    panel, schedule, truth = gen_dgp(dgp)
    write_simulation(cfg.out, panel, truth, dgp)
    outputs = [config.PANEL_FILE, config.TRUTH_FILE, config.DGP_FILE] + _adoption_plot(cfg, panel, schedule)
    _write_manifest(cfg, outputs)
    return config.EXIT_OK


COMMANDS = {
    "estimate": cmd_estimate,
    "decompose": cmd_decompose,
    "event-study": cmd_event_study,
    "simulate": cmd_simulate,
}
