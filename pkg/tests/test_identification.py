"""Tests for the plug-in group-time estimators and their aggregation."""

import numpy as np
import pytest

from identification import (
    AggregationWeights,
    ComparisonSet,
    EstimatorTag,
    GroupTimeEffect,
    TStarRule,
    Weighting,
    aggregate_atts,
    did_estimator,
    group_time_effects,
    triple_diff_estimator,
)
from simulate import AdoptionDesign, DGPConfig, EffectLaw, TrendModel, ViolationLaw, gen_dgp
from utils.errors import (
    EmptyCohort,
    EmptyEffects,
    EmptyPlaceboCohort,
    InvalidWindow,
    MissingWeight,
    UnnormalizedWeights,
)


def effect(r, g, t, estimate, n_treated=1):
    return GroupTimeEffect(r=r, g=g, t=t, estimate=estimate, n_treated=n_treated, n_comparison=1,
                           estimator=EstimatorTag.PROP2)


@pytest.fixture
def violated():
    """Noiseless within-stratum design, heterogeneous effects, common trend violation."""
    cfg = DGPConfig(
        S=5, R=3, T=6,
        design=AdoptionDesign.WITHIN_STRATUM_STAGGERED,
        effect=EffectLaw.EVENT_TIME_LINEAR, effect_constant=1.0, effect_slope=0.7, stratum_gradient=0.3,
        violation=ViolationLaw.COMMON,
        seed=13,
    )
    return gen_dgp(cfg)


def violation_bias(truth, schedule, e):
    """Mean trend departure of the treated cohort minus that of its comparison cohorts."""
    r, g, t = e.r - 1, e.g, e.t
    v = truth.violation[:, r, :]
    change = v[:, t - 1] - v[:, g - 2]
    column = schedule.g[:, r]
    treated = column == g
    comparison = np.isin(column, e.comparison)
    return change[treated].mean() - change[comparison].mean()


class TestDidEstimator:
    def test_no_effect(self):
        panel, schedule, _ = gen_dgp(DGPConfig(effect_constant=0.0, seed=1))
        for e in group_time_effects(panel, schedule, EstimatorTag.PROP1):
            assert e.estimate == pytest.approx(0.0, abs=1e-10)

    def test_constant_effect(self):
        panel, schedule, _ = gen_dgp(DGPConfig(S=6, effect_constant=2.5, seed=1))
        effects = group_time_effects(panel, schedule, EstimatorTag.PROP1)
        assert effects
        for e in effects:
            assert e.estimate == pytest.approx(2.5, abs=1e-10)

    def test_hand_computed(self, make_panel):
        y = np.array([[[1.0, 4.0]], [[2.0, 6.0]], [[0.0, 1.0]], [[1.0, 1.0]]])
        panel, schedule = make_panel(np.array([[2], [2], [3], [3]]), y)
        e = did_estimator(panel, schedule, r=1, g=2, t=2)
        assert e.estimate == pytest.approx(3.5 - 0.5)
        assert (e.n_treated, e.n_comparison) == (2, 2)
        assert e.estimator == EstimatorTag.PROP1

    def test_biased_by_violation(self, violated):
        panel, schedule, truth = violated
        effects = group_time_effects(panel, schedule, EstimatorTag.PROP1)
        assert any(abs(violation_bias(truth, schedule, e)) > 1e-6 for e in effects)
        for e in effects:
            gap = e.estimate - truth[(e.r, e.g, e.t)]
            assert gap == pytest.approx(violation_bias(truth, schedule, e), abs=1e-8)

    def test_empty_cohort(self):
        panel, schedule, _ = gen_dgp(DGPConfig(S=4, R=3, T=6))
        with pytest.raises(EmptyCohort):
            did_estimator(panel, schedule, r=1, g=3, t=3)

    @pytest.mark.parametrize("g, t, t_star", [(3, 2, TStarRule.LAST_PRE), (3, 3, 3), (1, 3, TStarRule.LAST_PRE)])
    def test_invalid_window(self, violated, g, t, t_star):
        panel, schedule, _ = violated
        with pytest.raises(InvalidWindow):
            did_estimator(panel, schedule, r=1, g=g, t=t, t_star=t_star)

    def test_comparison_already_treated(self, violated):
        panel, schedule, _ = violated
        with pytest.raises(InvalidWindow):
            did_estimator(panel, schedule, r=1, g=2, t=4, comparison=[3])


class TestTripleDiffEstimator:
    @pytest.mark.parametrize("t_star", [TStarRule.LAST_PRE, TStarRule.FULL_WINDOW])
    @pytest.mark.parametrize("comparison", [ComparisonSet.NOT_YET_TREATED, ComparisonSet.NEVER_TREATED])
    def test_recovers_truth(self, violated, t_star, comparison):
        panel, schedule, truth = violated
        effects = group_time_effects(panel, schedule, EstimatorTag.PROP2, t_star, comparison)
        assert effects
        for e in effects:
            assert e.estimate == pytest.approx(truth[(e.r, e.g, e.t)], abs=1e-8)
            assert e.estimate == pytest.approx(e.primary - e.placebo, abs=1e-12)

    def test_explicit_placebo_stratum(self, violated):
        panel, schedule, truth = violated
        e = triple_diff_estimator(panel, schedule, r=2, r_prime=3, g=3, t=5)
        assert e.placebo_strata == [3]
        assert e.estimate == pytest.approx(truth[(2, 3, 5)], abs=1e-8)

    def test_treated_placebo_stratum(self, violated):
        panel, schedule, _ = violated
        with pytest.raises(EmptyPlaceboCohort):
            triple_diff_estimator(panel, schedule, r=1, r_prime=2, g=2, t=3)

    def test_same_stratum(self, violated):
        panel, schedule, _ = violated
        with pytest.raises(InvalidWindow):
            triple_diff_estimator(panel, schedule, r=1, r_prime=1, g=2, t=3)


class TestAggregateAtts:
    def test_uniform(self):
        assert aggregate_atts([effect(1, 2, 2, 1.0), effect(1, 2, 3, 3.0)]) == pytest.approx(2.0)

    def test_explicit_weights(self):
        effects = [effect(1, 2, 2, 1.0), effect(1, 2, 3, 3.0)]
        weights = AggregationWeights(weights={(1, 2, 2): 0.25, (1, 2, 3): 0.75})
        assert aggregate_atts(effects, weights) == pytest.approx(2.5)

    def test_cohort_size(self):
        effects = [effect(1, 2, 2, 1.0, n_treated=1), effect(2, 3, 3, 3.0, n_treated=3)]
        assert aggregate_atts(effects, Weighting.COHORT_SIZE) == pytest.approx(2.5)

    def test_missing_weight(self):
        with pytest.raises(MissingWeight):
            aggregate_atts([effect(1, 2, 2, 1.0)], AggregationWeights(weights={(1, 2, 3): 1.0}))

    def test_unnormalized(self):
        effects = [effect(1, 2, 2, 1.0), effect(1, 2, 3, 3.0)]
        with pytest.raises(UnnormalizedWeights):
            aggregate_atts(effects, AggregationWeights(weights={(1, 2, 2): 0.5, (1, 2, 3): 0.6}))

    def test_empty(self):
        with pytest.raises(EmptyEffects):
            aggregate_atts([])

    def test_linear_in_effects(self):
        a = [effect(1, 2, 2, 1.0), effect(1, 2, 3, -2.0)]
        b = [effect(1, 2, 2, 4.0), effect(1, 2, 3, 0.5)]
        combined = [effect(1, 2, t, 2 * x.estimate + y.estimate) for t, x, y in zip((2, 3), a, b)]
        assert aggregate_atts(combined) == pytest.approx(2 * aggregate_atts(a) + aggregate_atts(b))


class TestUnitTimeTrend:
    @pytest.fixture
    def interacted(self):
        cfg = DGPConfig(
            S=5, R=3, T=6,
            design=AdoptionDesign.WITHIN_STRATUM_STAGGERED,
            effect=EffectLaw.EVENT_TIME_LINEAR, effect_constant=1.0, effect_slope=0.5,
            trend=TrendModel.UNIT_TIME,
            seed=19,
        )
        return gen_dgp(cfg)

    def test_triple_diff_is_exact(self, interacted):
        panel, schedule, truth = interacted
        effects = group_time_effects(panel, schedule, EstimatorTag.PROP2)
        assert effects
        for e in effects:
            assert e.estimate == pytest.approx(truth[(e.r, e.g, e.t)], abs=1e-8)

    def test_within_stratum_did_is_biased(self, interacted):
        panel, schedule, truth = interacted
        effects = group_time_effects(panel, schedule, EstimatorTag.PROP1)
        assert max(abs(e.estimate - truth[(e.r, e.g, e.t)]) for e in effects) > 1e-3
