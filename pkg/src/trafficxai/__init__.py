"""Traffic-flow prediction with accessibility-first model explanations.

Core pieces: UTD19-schema data handling, a deterministic random-forest
regressor, two from-scratch explanation engines (local linear surrogate and
exact Shapley values), renderers that turn attributions into screen-reader
friendly artifacts, and a cached HTTP service plus CLI on top.
"""

__version__ = "0.1.0"

from trafficxai.dataset import (
    Dataset,
    FeatureStats,
    TrafficRecord,
    feature_matrix,
    feature_stats,
    parse_csv,
    split,
    write_csv,
)
from trafficxai.explanations import Explanation, ExplanationMethod, FeatureContribution
from trafficxai.forest import Forest, ForestConfig, load_forest, save_forest, train
from trafficxai.render import AccessibleExplanation, render
from trafficxai.shapley import ShapConfig, ShapleyExplanation, explain_shap, shap_variant
from trafficxai.surrogate import LimeConfig, SurrogateExplanation, explain_lime, lime_variant

__all__ = [
    "AccessibleExplanation",
    "Dataset",
    "Explanation",
    "ExplanationMethod",
    "FeatureContribution",
    "FeatureStats",
    "Forest",
    "ForestConfig",
    "LimeConfig",
    "ShapConfig",
    "ShapleyExplanation",
    "SurrogateExplanation",
    "TrafficRecord",
    "explain_lime",
    "explain_shap",
    "feature_matrix",
    "feature_stats",
    "lime_variant",
    "load_forest",
    "parse_csv",
    "render",
    "save_forest",
    "shap_variant",
    "split",
    "train",
    "write_csv",
]
