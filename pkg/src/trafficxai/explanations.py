"""Shared vocabulary for method-tagged attribution sets.

Both explanation engines reduce to the same structure: a ranked list of
per-feature contributions around one prediction, plus method-specific
detail (intercept and fidelity for the surrogate, base value and running
sums for Shapley). Renderers and the service consume only this shape.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class UnknownMethod(ValueError):
    def __init__(self, name: str):
        self.name = name
        valid = ", ".join(m.value for m in ExplanationMethod)
        super().__init__(f"unknown explanation method {name!r}; valid methods: {valid}")


class ExplanationMethod(enum.Enum):
    LIME_SIMPLIFIED = "lime-simplified"
    LIME_DETAILED = "lime-detailed"
    SHAP_SIMPLIFIED = "shap-simplified"
    SHAP_DETAILED = "shap-detailed"

    @property
    def family(self) -> str:
        return self.value.split("-", 1)[0]

    @property
    def detailed(self) -> bool:
        return self.value.endswith("-detailed")

    @property
    def label(self) -> str:
        family = {"lime": "LIME", "shap": "SHAP"}[self.family]
        variant = "Detailed" if self.detailed else "Simplified"
        return f"{family} - {variant} Explanation"

    @classmethod
    def parse(cls, name: str) -> "ExplanationMethod":
        for method in cls:
            if method.value == name:
                return method
        raise UnknownMethod(name)


@dataclass(frozen=True)
class FeatureContribution:
    feature: str
    value: float
    contribution: float


def rank_contributions(
    features: tuple[str, ...], values, contributions
) -> tuple[FeatureContribution, ...]:
    """Sort by |contribution| descending; ties keep original feature order."""
    items = [
        FeatureContribution(feature=f, value=float(v), contribution=float(c))
        for f, v, c in zip(features, values, contributions)
    ]
    order = sorted(range(len(items)), key=lambda i: (-abs(items[i].contribution), i))
    return tuple(items[i] for i in order)


@dataclass(frozen=True)
class Explanation:
    """Attribution set for one prediction, tagged with its method.

    items are ranked by non-increasing |contribution|. base_value is the
    surrogate intercept for lime methods and the background-mean prediction
    for shap methods; simplified variants drop it along with all other
    detail fields. running_sums (shap-detailed) starts at base_value and
    appends the cumulative total after each ranked item, so it has
    len(items) + 1 entries. positive/negative feature groups (lime-detailed)
    are None when empty.
    """

    method: ExplanationMethod
    feature_names: tuple[str, ...]
    instance: tuple[float, ...]
    predicted: float
    items: tuple[FeatureContribution, ...]
    base_value: float | None = None
    fidelity: float | None = None
    running_sums: tuple[float, ...] | None = None
    positive_features: tuple[str, ...] | None = None
    negative_features: tuple[str, ...] | None = None
