"""Accessibility-first rendering of explanations.

Every explanation becomes a deterministic bundle: a descriptive paragraph,
a ranked point-form list, method-specific detail, an optional sonification
track (detailed Shapley only), a declarative high-contrast chart spec, and
ARIA metadata with an explicit reading order. All functions here are pure;
rendering the same explanation twice yields byte-identical output, which is
what keeps screen-reader output stable and cacheable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

from trafficxai.explanations import Explanation, ExplanationMethod, FeatureContribution


class MethodMismatch(ValueError):
    def __init__(self, have: ExplanationMethod, want: ExplanationMethod):
        super().__init__(f"explanation carries method {have.value!r}, asked to render {want.value!r}")


DISPLAY_NAMES = {"interval": "interval", "occ": "occupancy", "speed": "speed"}


def display_name(feature: str) -> str:
    return DISPLAY_NAMES.get(feature, feature)


@dataclass(frozen=True)
class Tone:
    frequency: float
    duration_ms: int
    pan: float

    def to_dict(self) -> dict:
        return {"frequency": self.frequency, "duration_ms": self.duration_ms, "pan": self.pan}


@dataclass(frozen=True)
class SonificationTrack:
    tones: tuple[Tone, ...]

    def to_dict(self) -> dict:
        return {"tones": [t.to_dict() for t in self.tones]}


@dataclass(frozen=True)
class SonificationConfig:
    min_freq: float = 220.0
    max_freq: float = 880.0
    duration_ms: int = 300


@dataclass(frozen=True)
class PaletteSpec:
    """High-contrast palette; every (fg, bg) pair must reach WCAG 4.5:1."""

    pairs: tuple[tuple[str, str], ...]
    text: str
    background: str
    positive: str
    negative: str
    neutral: str

    def to_dict(self) -> dict:
        return {
            "pairs": [list(p) for p in self.pairs],
            "text": self.text,
            "background": self.background,
            "positive": self.positive,
            "negative": self.negative,
            "neutral": self.neutral,
        }


PALETTE = PaletteSpec(
    pairs=(
        ("#FFFFFF", "#000000"),
        ("#00E5FF", "#000000"),
        ("#FFB000", "#000000"),
    ),
    text="#FFFFFF",
    background="#000000",
    positive="#00E5FF",
    negative="#FFB000",
    neutral="#FFFFFF",
)


@dataclass(frozen=True)
class RankedItem:
    feature: str
    raw_value: float
    contribution: float
    direction: str  # increases | decreases | neutral

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "raw_value": self.raw_value,
            "contribution": self.contribution,
            "direction": self.direction,
        }


@dataclass(frozen=True)
class AccessibleExplanation:
    method: ExplanationMethod
    summary_text: str
    ranked_items: tuple[RankedItem, ...]
    detail: dict | None
    sonification: SonificationTrack | None
    chart_spec: dict
    aria: dict

    def to_dict(self) -> dict:
        doc = {
            "method": self.method.value,
            "summary_text": self.summary_text,
            "ranked_items": [i.to_dict() for i in self.ranked_items],
            "chart_spec": self.chart_spec,
            "aria": self.aria,
        }
        if self.detail is not None:
            doc["detail"] = self.detail
        if self.sonification is not None:
            doc["sonification"] = self.sonification.to_dict()
        return doc

    def to_json_bytes(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")


def _srgb_channel_to_linear(byte_value: int) -> float:
    c = byte_value / 255.0
    if c <= 0.04045:
        return c / 12.92
    return ((c + 0.055) / 1.055) ** 2.4


def relative_luminance(color: str) -> float:
    """WCAG relative luminance of a #RRGGBB color."""
    h = color.lstrip("#")
    if len(h) != 6:
        raise ValueError(f"expected #RRGGBB color, got {color!r}")
    r, g, b = (int(h[i : i + 2], 16) for i in (0, 2, 4))
    return (
        0.2126 * _srgb_channel_to_linear(r)
        + 0.7152 * _srgb_channel_to_linear(g)
        + 0.0722 * _srgb_channel_to_linear(b)
    )


def contrast_ratio(fg: str, bg: str) -> float:
    """(L1 + 0.05) / (L2 + 0.05) with L1 >= L2; 21.0 for white on black."""
    l1 = relative_luminance(fg)
    l2 = relative_luminance(bg)
    if l1 < l2:
        l1, l2 = l2, l1
    return (l1 + 0.05) / (l2 + 0.05)


def sonify(
    items: Sequence[FeatureContribution | RankedItem],
    config: SonificationConfig | None = None,
) -> SonificationTrack:
    """Map ranked contributions to tones.

    Pitch encodes magnitude: frequency = min + span * |c| / max|c|, so the
    largest magnitude lands exactly on max_freq. Pan encodes sign (+1
    positive, -1 negative, 0 for zero). When every contribution is zero the
    whole track sits at min_freq with centered pan.
    """
    config = config or SonificationConfig()
    magnitudes = [abs(i.contribution) for i in items]
    for a, b in zip(magnitudes, magnitudes[1:]):
        if b > a:
            raise ValueError("items must be sorted by |contribution| descending")
    max_mag = magnitudes[0] if magnitudes else 0.0
    span = config.max_freq - config.min_freq

    tones = []
    for item in items:
        c = item.contribution
        if max_mag == 0.0:
            freq = config.min_freq
        else:
            freq = config.min_freq + span * (abs(c) / max_mag)
        pan = 1.0 if c > 0 else (-1.0 if c < 0 else 0.0)
        tones.append(Tone(frequency=freq, duration_ms=config.duration_ms, pan=pan))
    return SonificationTrack(tones=tuple(tones))


def _fmt(value: float) -> str:
    if math.isnan(value):
        return "nan"
    return f"{value:.1f}"


def _direction(contribution: float) -> str:
    if contribution > 0:
        return "increases"
    if contribution < 0:
        return "decreases"
    return "neutral"


def _feature_phrase(item: FeatureContribution) -> str:
    name = display_name(item.feature)
    if item.contribution > 0:
        return f"{name} increases the predicted flow by {_fmt(abs(item.contribution))}"
    if item.contribution < 0:
        return f"{name} decreases the predicted flow by {_fmt(abs(item.contribution))}"
    return f"{name} leaves the predicted flow unchanged"


def _join_names(names: list[str]) -> str:
    if len(names) == 1:
        return names[0]
    if len(names) == 2:
        return f"{names[0]} and {names[1]}"
    return ", ".join(names[:-1]) + f", and {names[-1]}"


def describe_text(explanation: Explanation, method: ExplanationMethod | None = None) -> str:
    """Deterministic summary paragraph; always contains the predicted value
    and names exactly min(3, n_features) features."""
    method = method or explanation.method
    if method is not explanation.method:
        raise MethodMismatch(explanation.method, method)

    sentences = [
        f"The model predicts a traffic flow of {_fmt(explanation.predicted)} vehicles per hour."
    ]
    if method.detailed and explanation.base_value is not None:
        if method.family == "shap":
            sentences.append(
                f"Starting from a baseline of {_fmt(explanation.base_value)}, "
                "each feature shifts the running total toward the prediction."
            )
        else:
            sentences.append(
                f"A local linear model with baseline {_fmt(explanation.base_value)} "
                "approximates the prediction in this neighbourhood."
            )

    top = list(explanation.items[: min(3, len(explanation.items))])
    if all(i.contribution == 0.0 for i in top):
        names = [display_name(i.feature) for i in top]
        sentences.append(
            f"{_join_names(names).capitalize()} had no measurable effect on this prediction."
        )
    else:
        phrases = [_feature_phrase(i) for i in top]
        sentences.append(
            "Ranked by influence: " + "; ".join(phrases) + "."
        )
    return " ".join(sentences)


def item_description(item: FeatureContribution, running_total: float | None = None) -> str:
    """One-line, screen-reader friendly description of a ranked item."""
    base = f"{display_name(item.feature)} of {_fmt(item.value)}"
    if item.contribution > 0:
        core = f"{base} increases the prediction by {_fmt(abs(item.contribution))}"
    elif item.contribution < 0:
        core = f"{base} decreases the prediction by {_fmt(abs(item.contribution))}"
    else:
        core = f"{base} leaves the prediction unchanged"
    if running_total is None:
        return core + "."
    return core + f"; running total {_fmt(running_total)}."


SECTION_LABELS = {
    "summary": "Explanation summary",
    "ranked_items": "Features ranked by influence",
    "positive_group": "Features increasing the prediction",
    "negative_group": "Features decreasing the prediction",
    "detail": "Model fit details",
    "running_sums": "Running totals from baseline to prediction",
    "sonification": "Audio encoding of the ranked features",
    "chart": "Chart view",
}


def _bar_color(contribution: float) -> str:
    if contribution > 0:
        return PALETTE.positive
    if contribution < 0:
        return PALETTE.negative
    return PALETTE.neutral


def _chart_spec(explanation: Explanation, method: ExplanationMethod) -> dict:
    if method is ExplanationMethod.SHAP_DETAILED:
        sums = explanation.running_sums or ()
        points = [
            {
                "label": display_name(item.feature),
                "value": sums[i + 1],
                "delta": item.contribution,
                "color": _bar_color(item.contribution),
            }
            for i, item in enumerate(explanation.items)
        ]
        return {
            "kind": "point",
            "title": method.label,
            "background": PALETTE.background,
            "axis_color": PALETTE.text,
            "baseline": explanation.base_value,
            "points": points,
        }
    return {
        "kind": "bar",
        "title": method.label,
        "background": PALETTE.background,
        "axis_color": PALETTE.text,
        "bars": [
            {
                "label": display_name(item.feature),
                "value": item.contribution,
                "color": _bar_color(item.contribution),
            }
            for item in explanation.items
        ],
    }


def render(explanation: Explanation, method: ExplanationMethod) -> AccessibleExplanation:
    """Pure conversion of an attribution set into its accessible artifact."""
    if explanation.method is not method:
        raise MethodMismatch(explanation.method, method)

    ranked = tuple(
        RankedItem(
            feature=item.feature,
            raw_value=item.value,
            contribution=item.contribution,
            direction=_direction(item.contribution),
        )
        for item in explanation.items
    )

    detail: dict | None = None
    sonification: SonificationTrack | None = None
    reading_order = ["summary", "ranked_items"]

    if method is ExplanationMethod.LIME_DETAILED:
        groups: dict = {}
        if explanation.positive_features:
            groups["positive"] = list(explanation.positive_features)
            reading_order.append("positive_group")
        if explanation.negative_features:
            groups["negative"] = list(explanation.negative_features)
            reading_order.append("negative_group")
        detail = {
            "base_or_intercept": explanation.base_value,
            "fidelity": explanation.fidelity,
            "groups": groups,
        }
        reading_order.append("detail")
    elif method is ExplanationMethod.SHAP_DETAILED:
        detail = {
            "base_or_intercept": explanation.base_value,
            "running_sums": list(explanation.running_sums or ()),
        }
        sonification = sonify(explanation.items)
        reading_order.extend(["running_sums", "sonification"])
    reading_order.append("chart")

    if method is ExplanationMethod.SHAP_DETAILED:
        sums = explanation.running_sums or ()
        descriptions = [
            item_description(item, running_total=sums[i + 1])
            for i, item in enumerate(explanation.items)
        ]
    else:
        descriptions = [item_description(item) for item in explanation.items]

    aria = {
        "role": "region",
        "label": method.label,
        "reading_order": reading_order,
        "section_labels": {k: SECTION_LABELS[k] for k in reading_order},
        "item_descriptions": descriptions,
        "palette": PALETTE.to_dict(),
    }

    return AccessibleExplanation(
        method=method,
        summary_text=describe_text(explanation, method),
        ranked_items=ranked,
        detail=detail,
        sonification=sonification,
        chart_spec=_chart_spec(explanation, method),
        aria=aria,
    )
