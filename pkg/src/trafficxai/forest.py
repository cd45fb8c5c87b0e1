"""Deterministic random-forest regressor built from CART variance-reduction trees.

Trees are grown in-repo rather than pulled from an ML library so that
training is reproducible bit-for-bit and the explainers' axioms (notably the
dummy-feature property) can be asserted exactly. All three features are
considered at every split; thresholds are midpoints between consecutive
distinct sorted values; ties in split quality go to the lowest feature
index, then the lowest threshold.

Persistence is a versioned line-oriented text format: a JSON header line,
one JSON line per tree, and a trailing whole-file checksum line.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import BinaryIO, Protocol, Sequence

import numpy as np

from trafficxai.dataset import FEATURE_NAMES, FeatureStats, feature_stats

FORMAT_VERSION = 1
DEFAULT_MODEL_PATH = "pretrained_model"


class ForestError(ValueError):
    """Base class for training and persistence failures."""


class ShapeMismatch(ForestError):
    def __init__(self, n_x: int, n_y: int):
        super().__init__(f"feature matrix has {n_x} rows but targets have {n_y}")


class DegenerateData(ForestError):
    def __init__(self, n: int):
        super().__init__(f"need at least 2 training rows, got {n}")


class ArtifactError(ForestError):
    """Base class for model artifact problems."""


class FormatVersionUnsupported(ArtifactError):
    def __init__(self, version):
        super().__init__(f"unsupported artifact format version {version!r}")


class CorruptArtifact(ArtifactError):
    pass


class Predictor(Protocol):
    """Pure evaluation capability: features in, flow out.

    Forest satisfies it; analytic test models can too, which lets the
    explainers be checked against closed-form oracles.
    """

    def predict(self, x: Sequence[float]) -> float: ...

    def predict_batch(self, xs: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_leaf: int = 1
    bootstrap_seed: int = 42

    def __post_init__(self):
        if self.n_trees < 1:
            raise ForestError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.min_samples_leaf < 1:
            raise ForestError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ForestError(f"max_depth must be >= 1 or None, got {self.max_depth}")

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "bootstrap_seed": self.bootstrap_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestConfig":
        return cls(
            n_trees=d["n_trees"],
            max_depth=d["max_depth"],
            min_samples_leaf=d["min_samples_leaf"],
            bootstrap_seed=d["bootstrap_seed"],
        )


class Tree:
    """One regression tree as flat node arrays (node 0 is the root).

    feature[i] == -1 marks a leaf; value[i] is only meaningful at leaves.
    """

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int32)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.value = np.asarray(value, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.feature)

    def predict_one(self, x: Sequence[float]) -> float:
        node = 0
        feature = self.feature
        while feature[node] >= 0:
            if x[feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return float(self.value[node])

    def predict_batch(self, xs: np.ndarray) -> np.ndarray:
        n = xs.shape[0]
        node = np.zeros(n, dtype=np.int32)
        active = np.flatnonzero(self.feature[node] >= 0)
        rows = np.arange(n)
        while active.size:
            cur = node[active]
            feat = self.feature[cur]
            go_left = xs[rows[active], feat] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
            active = active[self.feature[node[active]] >= 0]
        return self.value[node]

    def split_features(self) -> set[int]:
        """Feature indices used by any internal node."""
        return {int(f) for f in self.feature if f >= 0}

    def to_rows(self) -> list[list]:
        rows = []
        for i in range(len(self)):
            rows.append(
                [
                    int(self.feature[i]),
                    float(self.threshold[i]),
                    int(self.left[i]),
                    int(self.right[i]),
                    float(self.value[i]),
                ]
            )
        return rows

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Tree":
        if not rows:
            raise CorruptArtifact("tree with no nodes")
        cols = list(zip(*rows))
        return cls(cols[0], cols[1], cols[2], cols[3], cols[4])


@dataclass(frozen=True)
class Forest:
    """Trained tree ensemble; prediction is the plain mean over trees."""

    config: ForestConfig
    trees: tuple[Tree, ...]
    feature_names: tuple[str, ...] = FEATURE_NAMES
    training_stats: FeatureStats | None = None

    def predict(self, x: Sequence[float]) -> float:
        total = 0.0
        for tree in self.trees:
            total += tree.predict_one(x)
        return total / len(self.trees)

    def predict_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if xs.shape[0] == 0:
            return np.zeros(0, dtype=np.float64)
        total = np.zeros(xs.shape[0], dtype=np.float64)
        for tree in self.trees:
            total += tree.predict_batch(xs)
        return total / len(self.trees)


def _build_tree(
    xs: np.ndarray, ys: np.ndarray, max_depth: int | None, min_samples_leaf: int
) -> Tree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    n_features = xs.shape[1]
    msl = min_samples_leaf
    root = new_node()
    # stack of (node_id, sample index array, depth); children pushed right
    # first so the left subtree is laid out before the right one
    stack: list[tuple[int, np.ndarray, int]] = [(root, np.arange(xs.shape[0]), 0)]
    while stack:
        node_id, idx, depth = stack.pop()
        y = ys[idx]
        m = idx.size
        if (
            m < 2
            or m < 2 * msl
            or (max_depth is not None and depth >= max_depth)
            or (y[0] == y[-1] and (y == y[0]).all())
        ):
            value[node_id] = float(y.mean())
            continue

        best_sse = np.inf
        best_feature = -1
        best_threshold = 0.0
        for f in range(n_features):
            v = xs[idx, f]
            order = np.argsort(v)
            sv = v[order]
            sy = y[order]
            boundaries = np.flatnonzero(sv[1:] > sv[:-1])
            if boundaries.size == 0:
                continue
            boundaries = boundaries[(boundaries + 1 >= msl) & (m - boundaries - 1 >= msl)]
            if boundaries.size == 0:
                continue
            c1 = np.cumsum(sy)
            c2 = np.cumsum(sy * sy)
            t1 = c1[-1]
            t2 = c2[-1]
            nl = boundaries + 1.0
            nr = m - nl
            sse = (
                c2[boundaries]
                - c1[boundaries] ** 2 / nl
                + (t2 - c2[boundaries])
                - (t1 - c1[boundaries]) ** 2 / nr
            )
            k = int(np.argmin(sse))
            if sse[k] < best_sse:
                best_sse = float(sse[k])
                best_feature = f
                lo = sv[boundaries[k]]
                hi = sv[boundaries[k] + 1]
                mid = 0.5 * (lo + hi)
                # midpoint must reproduce the positional partition under
                # "<= threshold goes left"; fall back to the low value when
                # rounding pushed it onto hi
                best_threshold = float(mid) if lo <= mid < hi else float(lo)

        if best_feature < 0:
            value[node_id] = float(y.mean())
            continue

        go_left = xs[idx, best_feature] <= best_threshold
        feature[node_id] = best_feature
        threshold[node_id] = best_threshold
        left_id = new_node()
        right_id = new_node()
        left[node_id] = left_id
        right[node_id] = right_id
        stack.append((right_id, idx[~go_left], depth + 1))
        stack.append((left_id, idx[go_left], depth + 1))

    return Tree(feature, threshold, left, right, value)


def train(x: np.ndarray, y: Sequence[float], config: ForestConfig | None = None) -> Forest:
    """Fit a forest; fully deterministic given (x, y, config).

    Each tree sees a bootstrap resample drawn from a single PCG64 stream
    seeded with config.bootstrap_seed, in tree order.
    """
    config = config or ForestConfig()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2:
        raise ForestError(f"feature matrix must be 2-D, got shape {x.shape}")
    if x.shape[0] != y.shape[0]:
        raise ShapeMismatch(x.shape[0], y.shape[0])
    n = x.shape[0]
    if n < 2:
        raise DegenerateData(n)

    rng = np.random.default_rng(config.bootstrap_seed)
    trees = []
    for _ in range(config.n_trees):
        boot = rng.integers(0, n, size=n)
        trees.append(_build_tree(x[boot], y[boot], config.max_depth, config.min_samples_leaf))

    return Forest(
        config=config,
        trees=tuple(trees),
        feature_names=FEATURE_NAMES,
        training_stats=feature_stats(x),
    )


def save_forest(forest: Forest, sink: BinaryIO) -> None:
    """Write the versioned text artifact; byte-deterministic for equal forests."""
    header = {
        "format_version": FORMAT_VERSION,
        "config": forest.config.to_dict(),
        "feature_names": list(forest.feature_names),
        "training_stats": forest.training_stats.to_dict() if forest.training_stats else None,
        "n_trees": len(forest.trees),
    }
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    for tree in forest.trees:
        lines.append(json.dumps(tree.to_rows(), separators=(",", ":")))
    body = ("\n".join(lines) + "\n").encode("utf-8")
    digest = hashlib.sha256(body).hexdigest()
    sink.write(body)
    sink.write(f"sha256:{digest}\n".encode("ascii"))


def load_forest(source: BinaryIO) -> Forest:
    """Read an artifact written by save_forest; verifies checksum and version."""
    raw = source.read()
    if isinstance(raw, str):
        raw = raw.encode("utf-8")
    nl = raw.rfind(b"\n", 0, len(raw) - 1) if raw.endswith(b"\n") else raw.rfind(b"\n")
    if nl < 0:
        raise CorruptArtifact("artifact too short")
    body, tail = raw[: nl + 1], raw[nl + 1 :]
    if not tail.startswith(b"sha256:"):
        raise CorruptArtifact("missing checksum line")
    stated = tail[len(b"sha256:") :].strip().decode("ascii", "replace")
    actual = hashlib.sha256(body).hexdigest()
    if stated != actual:
        raise CorruptArtifact("checksum mismatch")

    lines = body.decode("utf-8").splitlines()
    try:
        header = json.loads(lines[0])
    except (json.JSONDecodeError, IndexError) as exc:
        raise CorruptArtifact(f"unreadable header: {exc}") from None
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatVersionUnsupported(version)

    try:
        config = ForestConfig.from_dict(header["config"])
        names = tuple(header["feature_names"])
        stats = (
            FeatureStats.from_dict(header["training_stats"])
            if header.get("training_stats")
            else None
        )
        n_trees = header["n_trees"]
        tree_lines = lines[1 : 1 + n_trees]
        if len(tree_lines) != n_trees:
            raise CorruptArtifact(f"expected {n_trees} trees, found {len(tree_lines)}")
        trees = tuple(Tree.from_rows(json.loads(line)) for line in tree_lines)
    except CorruptArtifact:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise CorruptArtifact(f"malformed artifact: {exc}") from None

    return Forest(config=config, trees=trees, feature_names=names, training_stats=stats)


def save_forest_file(forest: Forest, path) -> None:
    with open(path, "wb") as fh:
        save_forest(forest, fh)


def load_forest_file(path) -> Forest:
    with open(path, "rb") as fh:
        return load_forest(fh)


def training_mse(forest: Forest, x: np.ndarray, y: Sequence[float]) -> float:
    pred = forest.predict_batch(np.asarray(x, dtype=np.float64))
    resid = pred - np.asarray(y, dtype=np.float64)
    return float((resid * resid).mean())
