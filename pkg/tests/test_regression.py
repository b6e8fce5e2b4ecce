"""Tests for triple-demeaning, the closed-form coefficient and the fixed-effects solver."""

import numpy as np
import pandas as pd
import pytest

from decomposition import normalizer
from panel import aggregate_cells, load_panel
from regression import (
    anchored_cells,
    dense_ols_oracle,
    fit_three_way_fe,
    identified_cells,
    mean_field,
    tdr_estimate,
    triple_demean,
    weighted_tdr_estimate,
)
from regression.oracle import design_matrix
from utils.errors import NoResidualTreatmentVariation, SingularDesign, UnbalancedPanel


def additive_outcome(rng, S, R, T):
    return (
        rng.standard_normal((S, R))[:, :, None]
        + rng.standard_normal((S, T))[:, None, :]
        + rng.standard_normal((R, T))[None, :, :]
    )


class TestTripleDemean:
    def test_constant_is_absorbed(self, toy_panel):
        assert np.allclose(triple_demean(np.full((2, 2, 2), 7.0), toy_panel).values, 0.0, atol=1e-12)

    def test_sr_component_is_absorbed(self, toy_panel):
        values = np.broadcast_to(np.array([[1.0, 2.0], [3.0, 5.0]])[:, :, None], (2, 2, 2))
        assert np.allclose(triple_demean(values, toy_panel).values, 0.0, atol=1e-12)

    def test_single_treated_cell(self, toy_panel):
        residual = triple_demean(toy_panel.d, toy_panel).values
        assert residual[0, 0, 1] == pytest.approx(1 / 8)
        assert np.allclose(np.abs(residual), 1 / 8)
        # one index swap flips the sign
        assert residual[1, 0, 1] == pytest.approx(-1 / 8)
        assert residual[0, 1, 1] == pytest.approx(-1 / 8)
        assert residual[0, 0, 0] == pytest.approx(-1 / 8)

    def test_zero_sum_invariants(self, random_panels):
        for panel, _ in random_panels:
            residual = triple_demean(panel.y, panel).values
            assert np.allclose(residual.sum(axis=2), 0.0, atol=1e-12)
            assert np.allclose(residual.sum(axis=1), 0.0, atol=1e-12)
            assert np.allclose(residual.sum(axis=0), 0.0, atol=1e-12)

    def test_unbalanced(self, toy_frame):
        with pytest.raises(UnbalancedPanel):
            triple_demean(np.zeros((2, 2, 2)), load_panel(toy_frame.iloc[1:]))

    def test_mean_field(self, toy_panel):
        means = mean_field(toy_panel.y, toy_panel)
        assert means.sr[0, 0] == pytest.approx(3.0)
        assert means.grand == pytest.approx(20.0 / 8)


class TestTdrEstimate:
    def test_worked_example(self, toy_panel):
        assert tdr_estimate(toy_panel) == pytest.approx(2.0, abs=1e-12)

    def test_constant_outcome(self, make_panel):
        panel, _ = make_panel(np.array([[2, 4], [4, 4]]), np.full((2, 2, 3), 1.5))
        assert tdr_estimate(panel) == pytest.approx(0.0, abs=1e-12)

    def test_exact_multiple_of_treatment(self, make_panel):
        g = np.array([[2, 4], [3, 4]])
        panel, schedule = make_panel(g, np.zeros((2, 2, 3)))
        panel = panel.replace(y=3.0 * schedule.treated())
        assert tdr_estimate(panel) == pytest.approx(3.0)

    def test_no_treated_cells(self, make_panel):
        panel, _ = make_panel(np.full((2, 2), 3), np.zeros((2, 2, 2)))
        with pytest.raises(NoResidualTreatmentVariation):
            tdr_estimate(panel)

    def test_matches_dense_oracle(self, random_panels):
        for panel, _ in random_panels:
            assert tdr_estimate(panel) == pytest.approx(dense_ols_oracle(panel), abs=1e-8)

    def test_denominator_matches_normalizer(self, random_panels):
        for panel, schedule in random_panels:
            S, R, T = panel.shape
            rss = triple_demean(panel.d, panel).sum_of_squares()
            assert normalizer(schedule, panel) == pytest.approx(S * R * T * rss, abs=1e-10)


class TestDenseOracle:
    def test_worked_example(self, toy_panel):
        assert dense_ols_oracle(toy_panel) == pytest.approx(2.0, abs=1e-10)

    def test_all_control_is_singular(self, make_panel):
        panel, _ = make_panel(np.full((2, 2), 3), np.arange(8.0).reshape(2, 2, 2))
        with pytest.raises(SingularDesign):
            dense_ols_oracle(panel)


class TestFitThreeWayFe:
    def test_tau_matches_closed_form(self, random_panels):
        for panel, _ in random_panels[:20]:
            fit = fit_three_way_fe(panel, include_treatment=True)
            assert fit.tau == pytest.approx(tdr_estimate(panel), abs=1e-8)

    def test_weighted_tau_matches_weighted_oracle(self, random_panels):
        rng = np.random.default_rng(5)
        for panel, _ in random_panels[:10]:
            w = rng.exponential(size=(panel.S, panel.R, 1)) * np.ones(panel.shape)
            assert weighted_tdr_estimate(panel, w) == pytest.approx(dense_ols_oracle(panel, w), abs=1e-8)

    def test_exact_predictions_off_subset(self, make_panel):
        rng = np.random.default_rng(1)
        g = np.array([[2, 3, 5], [3, 5, 5], [5, 4, 5]])
        y0 = additive_outcome(rng, 3, 3, 4)
        panel, schedule = make_panel(g, y0 + 10.0 * schedule_mask(g, 4))
        fit = fit_three_way_fe(panel, subset=panel.d == 0)
        assert fit.anchored.all()
        assert np.allclose(fit.fixed_effects, y0, atol=1e-8)

    def test_residuals_orthogonal_to_groups(self, random_panels):
        rng = np.random.default_rng(9)
        for panel, _ in random_panels[:10]:
            w = rng.exponential(size=panel.shape)
            fit = fit_three_way_fe(panel, cell_weights=w)
            wr = w * fit.residuals(panel.y)
            assert np.allclose(wr.sum(axis=2), 0.0, atol=1e-8)
            assert np.allclose(wr.sum(axis=1), 0.0, atol=1e-8)
            assert np.allclose(wr.sum(axis=0), 0.0, atol=1e-8)

    def test_unanchored_stratum(self, make_panel):
        rng = np.random.default_rng(2)
        panel, _ = make_panel(np.full((3, 3), 5), rng.standard_normal((3, 3, 4)))
        subset = np.ones(panel.shape, dtype=bool)
        subset[:, 2, :] = False
        fit = fit_three_way_fe(panel, subset=subset)
        requested = np.zeros(panel.shape, dtype=bool)
        requested[:, 2, :] = True
        assert len(fit.unanchored(requested)) == 12
        assert np.isnan(fit.fixed_effects[:, 2, :]).all()


def schedule_mask(g, T):
    return (np.arange(1, T + 1)[None, None, :] >= np.asarray(g)[:, :, None]).astype(float)


class TestIdentifiedCells:
    def test_anchored_groups_without_unique_prediction(self, make_panel):
        rng = np.random.default_rng(4)
        g = np.array([[2, 3], [3, 2]])
        panel, _ = make_panel(g, additive_outcome(rng, 2, 2, 2))
        controls = panel.d == 0
        assert anchored_cells(np.where(controls, 1.0, 0.0))[panel.d == 1].all()
        fit = fit_three_way_fe(panel, subset=controls)
        assert not fit.anchored[0, 0, 1] and not fit.anchored[1, 1, 1]
        assert np.isnan(fit.fixed_effects[panel.d == 1]).all()
        assert np.isfinite(fit.fixed_effects[controls]).all()

    def test_fitting_cells_are_always_identified(self, random_panels):
        rng = np.random.default_rng(12)
        for panel, _ in random_panels[:10]:
            w = np.where(rng.random(panel.shape) < 0.7, 1.0, 0.0)
            identified = identified_cells(w)
            assert identified[w > 0].all()

    def test_box_of_controls_is_identified(self):
        w = np.ones((2, 2, 2))
        w[0, 0, 1] = 0.0
        identified = identified_cells(w)
        assert identified.all()


def individual_rows(rng, units, g, T):
    """Individual rows with units[s][r] members per (s, r) and adoption g[s][r] (T + 1 for never)."""
    rows = []
    for s, row in enumerate(units):
        for r, n in enumerate(row):
            for i in range(n):
                for t in range(1, T + 1):
                    rows.append({"unit": f"{s}-{r}-{i}", "s": s + 1, "r": r + 1, "t": t,
                                 "y": float(rng.standard_normal()), "d": int(t >= g[s][r])})
    return pd.DataFrame(rows)


class TestUnitCountWeights:
    @pytest.fixture
    def rows(self):
        return individual_rows(np.random.default_rng(31), [[1, 3], [2, 1]], [[2, 4], [3, 4]], 3)

    def test_solver_matches_oracle(self, rows):
        panel = aggregate_cells(rows)
        assert panel.unit_counts.tolist() == [[1, 3], [2, 1]]
        w = panel.cell_weights(proportional=True)
        assert weighted_tdr_estimate(panel, w) == pytest.approx(dense_ols_oracle(panel, w), abs=1e-8)

    def test_reproduces_individual_regression(self, rows):
        panel = aggregate_cells(rows)
        S, R, T = panel.shape
        cell = (rows["s"] - 1) * R * T + (rows["r"] - 1) * T + (rows["t"] - 1)
        X = design_matrix(panel)[cell.to_numpy()]
        coef, *_ = np.linalg.lstsq(X, rows["y"].to_numpy(), rcond=None)
        w = panel.cell_weights(proportional=True)
        assert weighted_tdr_estimate(panel, w) == pytest.approx(coef[0], abs=1e-8)

    def test_differs_from_unit_weights(self, rows):
        panel = aggregate_cells(rows)
        proportional = weighted_tdr_estimate(panel, panel.cell_weights(proportional=True))
        assert abs(proportional - tdr_estimate(panel)) > 1e-6
