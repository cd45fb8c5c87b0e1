"""Local linear surrogate explanations via kernel-weighted ridge regression.

One prediction is explained by sampling the model around the instance in
standardized feature space, weighting samples by an exponential proximity
kernel, and fitting a ridge-regularized linear model. The fitted
coefficients live in standardized space; an attribution is coefficient
times the instance's standardized value, which makes contributions signed
and comparable across features.

The ridge penalty applies to the coefficients only, never the intercept:
the 4x4 normal-equations system (X'W X + lambda * diag(0, 1, 1, 1)) beta =
X'W y is solved directly, X being [1 | z]. Features whose training standard
deviation is zero are sampled as constants and their coefficient is forced
to zero (a constant cannot explain variance, and keeping the column would
make the unpenalized system singular).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from trafficxai.dataset import FeatureStats
from trafficxai.explanations import Explanation, ExplanationMethod, rank_contributions
from trafficxai.forest import Predictor


class DegenerateStats(ValueError):
    def __init__(self):
        super().__init__("all feature standard deviations are zero; nothing to perturb")


@dataclass(frozen=True)
class LimeConfig:
    n_samples: int = 5000
    kernel_width: float = 0.75 * np.sqrt(3.0)
    ridge_lambda: float = 1.0
    seed: int = 42

    def __post_init__(self):
        if self.n_samples < 10:
            raise ValueError(f"n_samples must be >= 10, got {self.n_samples}")
        if not self.kernel_width > 0:
            raise ValueError(f"kernel_width must be > 0, got {self.kernel_width}")
        if self.ridge_lambda < 0:
            raise ValueError(f"ridge_lambda must be >= 0, got {self.ridge_lambda}")


@dataclass(frozen=True)
class SurrogateExplanation:
    """Fitted local surrogate around one instance.

    coefficients are in standardized-feature space; attributions are
    coefficient * standardized instance value. fidelity_r2 is the
    weighted R^2 of the surrogate against the model's own outputs.
    """

    intercept: float
    coefficients: tuple[float, ...]
    attributions: tuple[float, ...]
    fidelity_r2: float
    instance: tuple[float, ...]
    predicted: float
    feature_names: tuple[str, ...]

    def __post_init__(self):
        if len(self.coefficients) != len(self.feature_names):
            raise ValueError("one coefficient per feature required")
        if not self.fidelity_r2 <= 1.0:
            raise ValueError(f"fidelity_r2 must be <= 1, got {self.fidelity_r2}")


def proximity_weights(samples: np.ndarray, center: np.ndarray, kernel_width: float) -> np.ndarray:
    """exp(-||z - center||^2 / width^2); exactly 1 at the center."""
    d2 = ((samples - center) ** 2).sum(axis=1)
    return np.exp(-d2 / (kernel_width * kernel_width))


def explain_lime(
    predictor: Predictor,
    x: Sequence[float],
    stats: FeatureStats,
    config: LimeConfig | None = None,
    feature_names: tuple[str, ...] | None = None,
) -> SurrogateExplanation:
    """Fit the local surrogate; deterministic given config.seed.

    Perturbations are standard-normal draws per feature in standardized
    space (constant features pinned to the instance's standardized value),
    un-standardized with the training stats before querying the model.
    """
    config = config or LimeConfig()
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[0]
    mean = np.asarray(stats.mean, dtype=np.float64)
    std = np.asarray(stats.std, dtype=np.float64)
    varying = std > 0.0
    if not varying.any():
        raise DegenerateStats()
    safe_std = np.where(varying, std, 1.0)

    x_std = (x - mean) / safe_std

    rng = np.random.default_rng(config.seed)
    z = rng.standard_normal((config.n_samples, d))
    z[:, ~varying] = x_std[~varying]

    weights = proximity_weights(z, x_std, config.kernel_width)
    y = predictor.predict_batch(z * safe_std + mean)

    # design [1 | varying columns of z]; constant columns stay out of the solve
    cols = np.flatnonzero(varying)
    design = np.concatenate([np.ones((config.n_samples, 1)), z[:, cols]], axis=1)
    penalty = np.diag([0.0] + [config.ridge_lambda] * cols.size)
    wd = design * weights[:, None]
    beta = np.linalg.solve(design.T @ wd + penalty, wd.T @ y)

    coefficients = np.zeros(d)
    coefficients[cols] = beta[1:]
    intercept = float(beta[0])

    fitted = design @ beta
    w_sum = weights.sum()
    y_bar = float((weights * y).sum() / w_sum)
    sst = float((weights * (y - y_bar) ** 2).sum())
    ssr = float((weights * (y - fitted) ** 2).sum())
    fidelity = 1.0 if sst == 0.0 else 1.0 - ssr / sst

    return SurrogateExplanation(
        intercept=intercept,
        coefficients=tuple(float(c) for c in coefficients),
        attributions=tuple(float(c * v) for c, v in zip(coefficients, x_std)),
        fidelity_r2=fidelity,
        instance=tuple(float(v) for v in x),
        predicted=float(predictor.predict(x)),
        feature_names=feature_names or _default_feature_names(d),
    )


def _default_feature_names(d: int) -> tuple[str, ...]:
    from trafficxai.dataset import FEATURE_NAMES

    if d == len(FEATURE_NAMES):
        return FEATURE_NAMES
    return tuple(f"x{i + 1}" for i in range(d))


def lime_variant(
    explanation: SurrogateExplanation, variant: str | ExplanationMethod
) -> Explanation:
    """Project the surrogate into a simplified or detailed attribution set."""
    if isinstance(variant, ExplanationMethod):
        method = variant
    else:
        method = (
            ExplanationMethod.LIME_DETAILED
            if variant == "detailed"
            else ExplanationMethod.LIME_SIMPLIFIED
        )
    if method.family != "lime":
        raise ValueError(f"{method.value} is not a lime variant")

    items = rank_contributions(
        explanation.feature_names, explanation.instance, explanation.attributions
    )
    if not method.detailed:
        return Explanation(
            method=method,
            feature_names=explanation.feature_names,
            instance=explanation.instance,
            predicted=explanation.predicted,
            items=items,
        )

    positive = tuple(i.feature for i in items if i.contribution > 0)
    negative = tuple(i.feature for i in items if i.contribution < 0)
    return Explanation(
        method=method,
        feature_names=explanation.feature_names,
        instance=explanation.instance,
        predicted=explanation.predicted,
        items=items,
        base_value=explanation.intercept,
        fidelity=explanation.fidelity_r2,
        positive_features=positive or None,
        negative_features=negative or None,
    )
