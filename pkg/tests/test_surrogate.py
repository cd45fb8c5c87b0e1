"""Local surrogate fitting against an independent least-squares oracle.

The oracle reproduces the documented sampling recipe, then solves the same
weighted ridge objective through np.linalg.lstsq on an augmented system
instead of the module's normal-equations path.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FnPredictor
from trafficxai.dataset import FeatureStats, feature_matrix, feature_stats
from trafficxai.explanations import ExplanationMethod
from trafficxai.surrogate import (
    DegenerateStats,
    LimeConfig,
    SurrogateExplanation,
    explain_lime,
    lime_variant,
    proximity_weights,
)

STATS = FeatureStats(
    mean=(43000.0, 0.3, 55.0),
    std=(21000.0, 0.15, 25.0),
    minimum=(0.0, 0.0, 5.0),
    maximum=(86100.0, 0.6, 110.0),
)


def standardize(x, stats=STATS):
    return tuple((v - m) / s for v, m, s in zip(x, stats.mean, stats.std))


def oracle_fit(predictor, x, stats, config):
    """Same sampling recipe, independent solver (lstsq on the augmented system)."""
    mean = np.asarray(stats.mean)
    std = np.asarray(stats.std)
    varying = std > 0.0
    safe_std = np.where(varying, std, 1.0)
    x_std = (np.asarray(x, dtype=np.float64) - mean) / safe_std

    rng = np.random.default_rng(config.seed)
    z = rng.standard_normal((config.n_samples, len(mean)))
    z[:, ~varying] = x_std[~varying]
    w = np.exp(-((z - x_std) ** 2).sum(axis=1) / config.kernel_width**2)
    y = predictor.predict_batch(z * safe_std + mean)

    cols = np.flatnonzero(varying)
    design = np.concatenate([np.ones((config.n_samples, 1)), z[:, cols]], axis=1)
    sqrt_w = np.sqrt(w)
    penalty_rows = np.zeros((cols.size, design.shape[1]))
    for i in range(cols.size):
        penalty_rows[i, 1 + i] = math.sqrt(config.ridge_lambda)
    a = np.vstack([design * sqrt_w[:, None], penalty_rows])
    b = np.concatenate([y * sqrt_w, np.zeros(cols.size)])
    beta, *_ = np.linalg.lstsq(a, b, rcond=None)

    coefficients = np.zeros(len(mean))
    coefficients[cols] = beta[1:]
    return float(beta[0]), coefficients


class TestExplainLime:
    def test_constant_predictor(self):
        p = FnPredictor(lambda r: 7.0)
        e = explain_lime(p, np.array([40000.0, 0.2, 60.0]), STATS)
        assert abs(e.intercept - 7.0) <= 1e-9
        assert max(abs(c) for c in e.coefficients) <= 1e-9
        assert e.fidelity_r2 == 1.0
        assert max(abs(a) for a in e.attributions) <= 1e-8

    def test_recovers_standardized_speed_coefficient(self):
        p = FnPredictor(lambda r: 3.0 * (r[2] - STATS.mean[2]) / STATS.std[2])
        config = LimeConfig(ridge_lambda=0.01)
        e = explain_lime(p, np.array([40000.0, 0.2, 60.0]), STATS, config)
        assert abs(e.coefficients[2] - 3.0) <= 0.05 * 3.0
        assert abs(e.coefficients[0]) <= 0.05
        assert abs(e.coefficients[1]) <= 0.05
        assert e.fidelity_r2 >= 1.0 - 1e-6

    def test_recovers_full_linear_model(self):
        def fn(r):
            z = standardize(r)
            return 5.0 + 0.5 * z[0] - 2.0 * z[1] + 3.0 * z[2]

        e = explain_lime(FnPredictor(fn), np.array([10000.0, 0.5, 30.0]), STATS, LimeConfig(ridge_lambda=0.01))
        for got, want in zip(e.coefficients, (0.5, -2.0, 3.0)):
            assert abs(got - want) <= 0.05 * abs(want)
        assert abs(e.intercept - 5.0) <= 0.05 * 5.0
        assert e.fidelity_r2 >= 1.0 - 1e-6

    def test_solver_matches_oracle_linear(self):
        def fn(r):
            z = standardize(r)
            return 5.0 + 0.5 * z[0] - 2.0 * z[1] + 3.0 * z[2]

        config = LimeConfig(ridge_lambda=0.01)
        x = np.array([10000.0, 0.5, 30.0])
        e = explain_lime(FnPredictor(fn), x, STATS, config)
        intercept, coefficients = oracle_fit(FnPredictor(fn), x, STATS, config)
        assert abs(e.intercept - intercept) <= 1e-8
        assert np.max(np.abs(np.array(e.coefficients) - coefficients)) <= 1e-8

    def test_solver_matches_oracle_on_forest(self, fixture_forest, small_dataset):
        stats = fixture_forest.training_stats
        x = feature_matrix(small_dataset)[3]
        config = LimeConfig()
        e = explain_lime(fixture_forest, x, stats, config)
        intercept, coefficients = oracle_fit(fixture_forest, x, stats, config)
        assert abs(e.intercept - intercept) <= 1e-8
        assert np.max(np.abs(np.array(e.coefficients) - coefficients)) <= 1e-8

    def test_huge_lambda_shrinks_coefficients(self):
        p = FnPredictor(lambda r: math.sin(10.0 * r[1]) + math.cos(r[2] / 7.0))
        e = explain_lime(p, np.array([40000.0, 0.2, 60.0]), STATS, LimeConfig(ridge_lambda=1e9))
        assert max(abs(c) for c in e.coefficients) <= 1e-6

    def test_deterministic(self):
        p = FnPredictor(lambda r: r[1] * r[2])
        x = np.array([40000.0, 0.2, 60.0])
        assert explain_lime(p, x, STATS) == explain_lime(p, x, STATS)

    def test_seed_changes_samples(self):
        p = FnPredictor(lambda r: r[1] * r[2])
        x = np.array([40000.0, 0.2, 60.0])
        a = explain_lime(p, x, STATS, LimeConfig(seed=1))
        b = explain_lime(p, x, STATS, LimeConfig(seed=2))
        assert a.coefficients != b.coefficients

    def test_all_constant_stats_rejected(self):
        flat = FeatureStats(mean=(1.0, 1.0, 1.0), std=(0.0, 0.0, 0.0), minimum=(1.0,) * 3, maximum=(1.0,) * 3)
        with pytest.raises(DegenerateStats):
            explain_lime(FnPredictor(lambda r: 1.0), np.array([1.0, 1.0, 1.0]), flat)

    def test_constant_feature_coefficient_is_zero(self):
        stats = FeatureStats(
            mean=(43000.0, 0.3, 55.0), std=(21000.0, 0.15, 0.0), minimum=(0.0, 0.0, 55.0), maximum=(86100.0, 0.6, 55.0)
        )
        p = FnPredictor(lambda r: r[1] * 10.0 + r[2])
        e = explain_lime(p, np.array([40000.0, 0.2, 55.0]), stats)
        assert e.coefficients[2] == 0.0
        assert e.attributions[2] == 0.0
        assert abs(e.coefficients[1]) > 0.1

    def test_attribution_is_coefficient_times_standardized_value(self):
        p = FnPredictor(lambda r: r[1] * r[2])
        x = np.array([40000.0, 0.2, 60.0])
        e = explain_lime(p, x, STATS)
        z = standardize(x)
        for a, c, v in zip(e.attributions, e.coefficients, z):
            assert a == pytest.approx(c * v, abs=1e-12)

    def test_predicted_is_model_output(self):
        p = FnPredictor(lambda r: r[1] * r[2])
        x = np.array([40000.0, 0.2, 60.0])
        assert explain_lime(p, x, STATS).predicted == 0.2 * 60.0

    @given(seed=st.integers(min_value=0, max_value=2**16), scale=st.floats(min_value=0.1, max_value=100.0))
    @settings(max_examples=30, deadline=None)
    def test_fidelity_never_exceeds_one(self, seed, scale):
        rng = np.random.default_rng(seed)
        c = rng.uniform(-1, 1, size=4)
        p = FnPredictor(lambda r: scale * (c[0] + c[1] * r[1] ** 2 + c[2] * math.sin(r[2]) + c[3] * r[1] * r[2]))
        e = explain_lime(p, np.array([40000.0, 0.2, 60.0]), STATS, LimeConfig(n_samples=300, seed=seed))
        assert e.fidelity_r2 <= 1.0


class TestWeights:
    def test_center_weight_is_exactly_one(self):
        center = np.array([0.5, -1.0, 2.0])
        w = proximity_weights(center[None, :], center, 1.3)
        assert w[0] == 1.0

    def test_monotone_decreasing_in_distance(self):
        center = np.zeros(3)
        points = np.array([[d, 0.0, 0.0] for d in (0.0, 0.5, 1.0, 2.0, 4.0)])
        w = proximity_weights(points, center, 1.3)
        assert np.all(np.diff(w) < 0)

    def test_default_kernel_width(self):
        assert LimeConfig().kernel_width == pytest.approx(0.75 * math.sqrt(3.0))


class TestConfigValidation:
    def test_rejects_tiny_sample_count(self):
        with pytest.raises(ValueError):
            LimeConfig(n_samples=5)

    def test_rejects_zero_kernel_width(self):
        with pytest.raises(ValueError):
            LimeConfig(kernel_width=0.0)

    def test_rejects_negative_lambda(self):
        with pytest.raises(ValueError):
            LimeConfig(ridge_lambda=-1.0)


def make_surrogate(attributions, names=("interval", "occ", "speed")):
    return SurrogateExplanation(
        intercept=10.0,
        coefficients=tuple(a * 2.0 for a in attributions),
        attributions=tuple(attributions),
        fidelity_r2=0.9,
        instance=(40000.0, 0.2, 60.0),
        predicted=12.0,
        feature_names=names,
    )


class TestLimeVariant:
    def test_all_positive_has_no_negative_group(self):
        e = lime_variant(make_surrogate((1.0, 3.0, 8.0)), "detailed")
        assert e.negative_features is None
        assert len(e.positive_features) == 3

    def test_mixed_signs_has_both_groups(self):
        e = lime_variant(make_surrogate((-3.0, 0.0, 8.0)), "detailed")
        assert e.positive_features == ("speed",)
        assert e.negative_features == ("interval",)

    def test_simplified_is_projection(self):
        e = lime_variant(make_surrogate((1.0, 3.0, 8.0)), "simplified")
        assert e.base_value is None
        assert e.fidelity is None
        assert e.positive_features is None
        assert [i.feature for i in e.items] == ["speed", "occ", "interval"]

    def test_detailed_carries_fit_fields(self):
        e = lime_variant(make_surrogate((1.0, 3.0, 8.0)), "detailed")
        assert e.base_value == 10.0
        assert e.fidelity == 0.9
        assert e.method is ExplanationMethod.LIME_DETAILED

    def test_items_ranked_by_magnitude(self):
        e = lime_variant(make_surrogate((-5.0, 2.0, 4.0)), "simplified")
        mags = [abs(i.contribution) for i in e.items]
        assert mags == sorted(mags, reverse=True)

    def test_shap_method_rejected(self):
        with pytest.raises(ValueError):
            lime_variant(make_surrogate((1.0, 2.0, 3.0)), ExplanationMethod.SHAP_DETAILED)
