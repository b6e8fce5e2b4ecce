"""Tests for the simulated panels and their truth tables."""

import os

import numpy as np
import pandas as pd
import pytest

from panel import derive_schedule, read_panel_csv
from regression import triple_demean
from simulate import (
    AdoptionDesign,
    DGPConfig,
    EffectEntry,
    EffectLaw,
    NoiseModel,
    TrendModel,
    ViolationLaw,
    gen_dgp,
    named_design,
    write_simulation,
)
from utils.errors import InvalidConfig, UnknownDesign
from utils.storage import load_json


class TestNamedDesigns:
    def test_pure_placebo_stratum(self):
        expected = np.array([[2, 5], [2, 5], [5, 5], [5, 5]])
        np.testing.assert_array_equal(named_design("pure-placebo-stratum", 4, 2, 4), expected)

    def test_cross_stratum_staggered(self):
        expected = np.array([[2, 7, 7], [2, 3, 7], [7, 3, 7], [7, 7, 7]])
        np.testing.assert_array_equal(named_design(AdoptionDesign.CROSS_STRATUM_STAGGERED, 4, 3, 6), expected)

    def test_within_stratum_staggered(self):
        expected = np.array([[2, 2, 7], [3, 3, 7], [4, 4, 7], [7, 7, 7]])
        np.testing.assert_array_equal(named_design("within-stratum-staggered", 4, 3, 6), expected)

    def test_unknown(self):
        with pytest.raises(UnknownDesign):
            named_design("bogus", 4, 3, 6)

    def test_first_adoption_out_of_range(self):
        with pytest.raises(InvalidConfig):
            named_design("pure-placebo-stratum", 4, 2, 4, first_adoption=1)
        with pytest.raises(InvalidConfig):
            named_design("pure-placebo-stratum", 4, 2, 4, first_adoption=5)

    def test_cross_design_must_fit(self):
        with pytest.raises(InvalidConfig):
            named_design("cross-stratum-staggered", 4, 4, 3)

    @pytest.mark.parametrize("design", list(AdoptionDesign))
    def test_panels_derive_their_schedule(self, design):
        panel, schedule, _ = gen_dgp(DGPConfig(S=5, R=3, T=6, design=design, sigma=0.5))
        np.testing.assert_array_equal(derive_schedule(panel).g, schedule.g)


class TestTruth:
    def test_zero_before_initiation(self):
        _, _, truth = gen_dgp(DGPConfig(effect_constant=2.0))
        for (r, g, t), att in truth.att.items():
            assert att == (0.0 if t < g else 2.0)

    def test_event_time_linear_with_gradient(self):
        cfg = DGPConfig(effect=EffectLaw.EVENT_TIME_LINEAR, effect_constant=1.0, effect_slope=0.5, stratum_gradient=2.0)
        _, _, truth = gen_dgp(cfg)
        assert truth[(1, 2, 4)] == pytest.approx(2.0)
        assert truth[(2, 3, 3)] == pytest.approx(3.0)

    def test_table_law(self):
        cfg = DGPConfig(
            S=2, R=2, T=3,
            adoption=[[2, None], [None, None]],
            effect=EffectLaw.TABLE,
            effect_table=[EffectEntry(r=1, g=2, t=2, att=0.5), EffectEntry(r=1, g=2, t=3, att=0.7)],
        )
        panel, _, truth = gen_dgp(cfg)
        assert truth[(1, 2, 1)] == 0.0
        assert truth.cell_effect[0, 0, 1:].tolist() == [0.5, 0.7]
        assert truth.uniform_att == pytest.approx(0.6)
        assert int(panel.d.sum()) == 2

    def test_table_law_missing_entry(self):
        cfg = DGPConfig(S=2, R=2, T=3, adoption=[[2, None], [None, None]], effect=EffectLaw.TABLE)
        with pytest.raises(InvalidConfig):
            gen_dgp(cfg)

    @pytest.mark.parametrize("adoption", [[[2, None]], [[1, None], [None, None]], [[2, 9], [None, None]]])
    def test_bad_adoption_map(self, adoption):
        with pytest.raises(InvalidConfig):
            gen_dgp(DGPConfig(S=2, R=2, T=3, adoption=adoption))

    def test_uniform_att_is_cell_mean(self):
        panel, _, truth = gen_dgp(DGPConfig(effect=EffectLaw.EVENT_TIME_LINEAR, effect_slope=1.0))
        assert truth.uniform_att == pytest.approx(truth.cell_effect[panel.d == 1].mean())

    def test_to_frame(self):
        _, _, truth = gen_dgp(DGPConfig())
        frame = truth.to_frame()
        assert list(frame.columns) == ["r", "g", "t", "att"]
        assert len(frame) == len(truth.att)


class TestUntreatedOutcomes:
    def untreated(self, cfg):
        panel, _, truth = gen_dgp(cfg)
        return panel, panel.y - truth.cell_effect

    @pytest.mark.parametrize("violation", [ViolationLaw.NONE, ViolationLaw.COMMON])
    def test_absorbed_by_fixed_effects(self, violation):
        panel, y0 = self.untreated(DGPConfig(violation=violation, seed=3))
        assert triple_demean(y0, panel).sum_of_squares() == pytest.approx(0.0, abs=1e-18)

    def test_stratum_specific_violation_is_not(self):
        panel, y0 = self.untreated(DGPConfig(violation=ViolationLaw.STRATUM_SPECIFIC, seed=3))
        assert triple_demean(y0, panel).sum_of_squares() > 1e-3

    def test_unit_time_trend_is_absorbed(self):
        panel, y0 = self.untreated(DGPConfig(trend=TrendModel.UNIT_TIME, seed=3))
        assert triple_demean(y0, panel).sum_of_squares() == pytest.approx(0.0, abs=1e-18)

    @pytest.mark.parametrize("trend, interacts", [(TrendModel.ADDITIVE, False), (TrendModel.UNIT_TIME, True)])
    def test_unit_time_interaction(self, trend, interacts):
        _, y0 = self.untreated(DGPConfig(trend=trend, seed=3))
        within_stratum = (y0[0, 0, 1] - y0[0, 0, 0]) - (y0[1, 0, 1] - y0[1, 0, 0])
        assert (abs(within_stratum) > 1e-6) == interacts

    def test_common_violation_grows_with_lead(self):
        _, _, truth = gen_dgp(DGPConfig(violation=ViolationLaw.COMMON, violation_magnitude=1.0))
        # unit 1 first adopts at 2 in a 6-period panel
        assert truth.violation[0, 2, :].tolist() == [0.0, 5.0, 10.0, 15.0, 20.0, 25.0]
        assert (truth.violation[3] == 0).all()


class TestDeterminism:
    @pytest.mark.parametrize("noise", list(NoiseModel))
    def test_same_seed_same_panel(self, noise):
        cfg = DGPConfig(noise=noise, sigma=1.0, seed=17)
        a, _, _ = gen_dgp(cfg)
        b, _, _ = gen_dgp(cfg)
        np.testing.assert_array_equal(a.y, b.y)

    def test_seed_changes_panel(self):
        a, _, _ = gen_dgp(DGPConfig(seed=1))
        b, _, _ = gen_dgp(DGPConfig(seed=2))
        assert not np.array_equal(a.y, b.y)


def test_write_simulation(tmp_path):
    cfg = DGPConfig(sigma=0.3, seed=8)
    panel, _, truth = gen_dgp(cfg)
    paths = write_simulation(str(tmp_path), panel, truth, cfg)

    assert sorted(paths) == ["config", "panel", "truth"]
    assert all(os.path.exists(p) for p in paths.values())
    reread = read_panel_csv(paths["panel"])
    np.testing.assert_allclose(reread.y, panel.y, rtol=1e-11)
    np.testing.assert_array_equal(reread.d, panel.d)
    assert len(pd.read_csv(paths["truth"])) == len(truth.att)
    assert DGPConfig(**load_json(paths["config"])) == cfg
