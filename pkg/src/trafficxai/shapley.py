"""Exact interventional Shapley values by full coalition enumeration.

With three model features there are only eight coalitions, so the Shapley
sum is evaluated exactly: v(S) is the mean model output over a background
sample with the coalition's features pinned to the explained instance, and
phi_j averages the weighted marginal contributions of feature j over every
coalition that excludes it. Exactness turns the Shapley axioms (efficiency,
symmetry, dummy, linearity) into hard test assertions instead of sampling
approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from trafficxai.explanations import Explanation, ExplanationMethod, rank_contributions
from trafficxai.forest import Predictor


class EmptyBackground(ValueError):
    def __init__(self):
        super().__init__("background sample must contain at least one row")


@dataclass(frozen=True)
class ShapConfig:
    background_size: int = 100
    background_seed: int = 42

    def __post_init__(self):
        if self.background_size < 1:
            raise ValueError(f"background_size must be >= 1, got {self.background_size}")


@dataclass(frozen=True)
class ShapleyExplanation:
    """Exact per-feature Shapley attributions for one prediction.

    base_value is v(empty set), the mean prediction over the background.
    Efficiency (base_value + sum(phi) == predicted) is checked on
    construction to 1e-6.
    """

    base_value: float
    phi: tuple[float, ...]
    instance: tuple[float, ...]
    predicted: float
    feature_names: tuple[str, ...]

    def __post_init__(self):
        gap = abs(self.base_value + sum(self.phi) - self.predicted)
        if not gap <= 1e-6:
            raise ValueError(f"efficiency violated: base + sum(phi) - predicted = {gap:g}")


def sample_background(features: np.ndarray, config: ShapConfig | None = None) -> np.ndarray:
    """Seeded subsample of rows to serve as the reference distribution.

    Takes min(background_size, n) rows without replacement; the whole
    matrix (copied) when it is already small enough.
    """
    config = config or ShapConfig()
    features = np.asarray(features, dtype=np.float64)
    n = features.shape[0]
    if n <= config.background_size:
        return features.copy()
    rng = np.random.default_rng(config.background_seed)
    idx = rng.choice(n, size=config.background_size, replace=False)
    return features[idx]


def explain_shap(
    predictor: Predictor,
    x: Sequence[float],
    background: np.ndarray,
    feature_names: tuple[str, ...] | None = None,
) -> ShapleyExplanation:
    """Enumerate all 2^d coalitions over the background sample.

    Deterministic: the only randomness in the pipeline lives in how the
    background was sampled, which the caller controls.
    """
    x = np.asarray(x, dtype=np.float64)
    background = np.asarray(background, dtype=np.float64)
    if background.ndim != 2 or background.shape[0] == 0:
        raise EmptyBackground()
    d = x.shape[0]
    n_b = background.shape[0]

    # one stacked batch: block s holds the background with coalition s's
    # features overwritten by the instance
    n_coalitions = 1 << d
    stacked = np.tile(background, (n_coalitions, 1))
    for s in range(n_coalitions):
        block = slice(s * n_b, (s + 1) * n_b)
        for j in range(d):
            if s >> j & 1:
                stacked[block, j] = x[j]
    preds = np.asarray(predictor.predict_batch(stacked), dtype=np.float64)
    v = np.array([preds[s * n_b : (s + 1) * n_b].mean() for s in range(n_coalitions)])

    fact = math.factorial
    phi = np.zeros(d)
    for j in range(d):
        total = 0.0
        for s in range(n_coalitions):
            if s >> j & 1:
                continue
            size = bin(s).count("1")
            weight = fact(size) * fact(d - size - 1) / fact(d)
            total += weight * (v[s | (1 << j)] - v[s])
        phi[j] = total

    if feature_names is None:
        from trafficxai.dataset import FEATURE_NAMES

        feature_names = FEATURE_NAMES if d == len(FEATURE_NAMES) else tuple(
            f"x{i + 1}" for i in range(d)
        )

    return ShapleyExplanation(
        base_value=float(v[0]),
        phi=tuple(float(p) for p in phi),
        instance=tuple(float(val) for val in x),
        predicted=float(predictor.predict(x)),
        feature_names=feature_names,
    )


def shap_variant(
    explanation: ShapleyExplanation, variant: str | ExplanationMethod
) -> Explanation:
    """Project Shapley values into a simplified or detailed attribution set.

    Detailed mode orders data points by descending |phi| and carries the
    running cumulative sum from base_value to the prediction, one entry per
    point plus the starting base, ready for keyboard stepping and per-point
    sonification.
    """
    if isinstance(variant, ExplanationMethod):
        method = variant
    else:
        method = (
            ExplanationMethod.SHAP_DETAILED
            if variant == "detailed"
            else ExplanationMethod.SHAP_SIMPLIFIED
        )
    if method.family != "shap":
        raise ValueError(f"{method.value} is not a shap variant")

    items = rank_contributions(explanation.feature_names, explanation.instance, explanation.phi)
    if not method.detailed:
        return Explanation(
            method=method,
            feature_names=explanation.feature_names,
            instance=explanation.instance,
            predicted=explanation.predicted,
            items=items,
        )

    sums = [explanation.base_value]
    for item in items:
        sums.append(sums[-1] + item.contribution)
    return Explanation(
        method=method,
        feature_names=explanation.feature_names,
        instance=explanation.instance,
        predicted=explanation.predicted,
        items=items,
        base_value=explanation.base_value,
        running_sums=tuple(sums),
    )
