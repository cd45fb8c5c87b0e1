"""HTTP API serving predictions and cached accessible explanations.

The app is a plain FastAPI factory around an AppState. Explanations are
expensive relative to serving, so rendered payloads are cached as the exact
bytes sent over the wire, keyed by (method, feature vector). Two rows with
identical features therefore share one cache entry and byte-identical
responses.
"""

from __future__ import annotations

import hashlib
import os
import struct
import threading
from dataclasses import dataclass, field
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from trafficxai.dataset import Dataset, DatasetError, feature_matrix, parse_csv
from trafficxai.explanations import ExplanationMethod, UnknownMethod
from trafficxai.forest import DEFAULT_MODEL_PATH, Forest, load_forest_file
from trafficxai.render import AccessibleExplanation, render
from trafficxai.shapley import ShapConfig, explain_shap, sample_background, shap_variant
from trafficxai.surrogate import LimeConfig, explain_lime, lime_variant

import numpy as np


class ApiError(Exception):
    def __init__(self, status: int, error: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.error = error
        self.detail = detail


class ExplanationCache:
    """Insert-once byte cache keyed by method and exact feature values."""

    def __init__(self) -> None:
        self._store: dict[bytes, bytes] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(method: ExplanationMethod, features: tuple[float, float, float]) -> bytes:
        digest = hashlib.sha256()
        digest.update(method.value.encode("utf-8"))
        digest.update(struct.pack("<3d", *features))
        return digest.digest()

    def get_or_compute(
        self,
        method: ExplanationMethod,
        features: tuple[float, float, float],
        compute: Callable[[], bytes],
    ) -> tuple[bytes, bool]:
        k = self.key(method, features)
        with self._lock:
            payload = self._store.get(k)
            if payload is not None:
                self.hits += 1
                return payload, True
        # compute outside the lock; duplicate work is possible but the first
        # stored payload wins so responses stay byte-identical
        payload = compute()
        with self._lock:
            stored = self._store.setdefault(k, payload)
            if stored is payload:
                self.misses += 1
                return stored, False
            self.hits += 1
            return stored, True

    def stats(self) -> dict:
        with self._lock:
            return {"hits": self.hits, "misses": self.misses}


@dataclass
class AppState:
    model_path: str
    data_path: str
    forest: Forest | None = None
    dataset: Dataset | None = None
    background: np.ndarray | None = None
    cache: ExplanationCache = field(default_factory=ExplanationCache)
    lime_config: LimeConfig = field(default_factory=LimeConfig)
    shap_config: ShapConfig = field(default_factory=ShapConfig)
    _predictions: list | None = None
    _lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def ready(self) -> bool:
        return self.forest is not None and self.dataset is not None

    def load_dataset(self, path: str) -> None:
        with open(path, "rb") as fh:
            dataset = parse_csv(fh, source_name=path)
        with self._lock:
            self.dataset = dataset
            self.background = None
            self._predictions = None

    def prediction_rows(self) -> list:
        """Prediction table, computed on first request and then reused."""
        with self._lock:
            if self._predictions is None:
                assert self.forest is not None and self.dataset is not None
                xs = feature_matrix(self.dataset)
                preds = self.forest.predict_batch(xs)
                self._predictions = [
                    {
                        "row_id": i,
                        "pred_flow": float(preds[i]),
                        "city": r.city,
                        "detector": r.detid,
                        "speed": r.speed,
                        "occupancy": r.occ,
                    }
                    for i, r in enumerate(self.dataset.records)
                ]
            return self._predictions

    def shap_background(self) -> np.ndarray:
        with self._lock:
            if self.background is None:
                assert self.dataset is not None
                self.background = sample_background(feature_matrix(self.dataset), self.shap_config)
            return self.background


def _scenario_payload() -> dict:
    return {
        "impact": "Third-Party AI",
        "function": "Descriptive AI",
        "transparency": "Black-Box AI",
        "reasoning": "Deductive Reasoning",
        "persona": {
            "name": "Caroline",
            "age": 45,
            "role": "traffic manager",
            "description": (
                "Caroline, 45, manages city traffic and has been blind since "
                "birth; she works through a screen reader and keyboard."
            ),
        },
        "button_label": "Get Traffic Flow Prediction and Location Details",
        "methods": [{"value": m.value, "label": m.label} for m in ExplanationMethod],
    }


def _explain_bytes(state: AppState, method: ExplanationMethod, features: tuple) -> bytes:
    forest = state.forest
    assert forest is not None
    x = np.asarray(features, dtype=np.float64)
    if method.family == "lime":
        surrogate = explain_lime(
            forest, x, forest.training_stats, state.lime_config, feature_names=forest.feature_names
        )
        explanation = lime_variant(surrogate, method)
    else:
        shap = explain_shap(forest, x, state.shap_background(), feature_names=forest.feature_names)
        explanation = shap_variant(shap, method)
    rendered: AccessibleExplanation = render(explanation, method)
    return rendered.to_json_bytes()


def create_app(
    model_path: str | None = None,
    data_path: str | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    model_path = model_path or os.environ.get("MODEL_PATH", DEFAULT_MODEL_PATH)
    data_path = data_path or os.environ.get("DATA_PATH", "UTD19.csv")
    ui_dir = ui_dir or os.environ.get("UI_DIR", "")

    state = AppState(model_path=model_path, data_path=data_path)
    if os.path.exists(model_path):
        state.forest = load_forest_file(model_path)
    if os.path.exists(data_path):
        state.load_dataset(data_path)

    app = FastAPI(title="trafficxai", docs_url=None, redoc_url=None)
    app.state.traffic = state

    @app.exception_handler(ApiError)
    async def handle_api_error(_: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content={"error": exc.error, "detail": exc.detail})

    def require_ready() -> None:
        if not state.ready:
            missing = []
            if state.forest is None:
                missing.append(f"model at {state.model_path!r}")
            if state.dataset is None:
                missing.append(f"data at {state.data_path!r}")
            raise ApiError(503, "not_ready", "service missing " + " and ".join(missing))

    @app.get("/api/health")
    def health() -> dict:
        return {
            "ready": state.ready,
            "model_loaded": state.forest is not None,
            "rows": len(state.dataset) if state.dataset is not None else 0,
            "cache": state.cache.stats(),
        }

    @app.get("/api/predictions")
    def predictions() -> list:
        require_ready()
        return state.prediction_rows()

    @app.get("/api/explanations/{row_id}")
    def explanations(row_id: str, method: str = "") -> Response:
        require_ready()
        if not method:
            raise ApiError(
                400,
                "missing_method",
                "method query parameter is required; one of "
                + ", ".join(m.value for m in ExplanationMethod),
            )
        try:
            parsed_method = ExplanationMethod.parse(method)
        except UnknownMethod as exc:
            raise ApiError(400, "unknown_method", str(exc)) from exc
        try:
            index = int(row_id)
        except ValueError as exc:
            raise ApiError(400, "bad_row_id", f"row_id must be an integer, got {row_id!r}") from exc
        dataset = state.dataset
        assert dataset is not None
        if not 0 <= index < len(dataset):
            raise ApiError(404, "row_not_found", f"row_id {index} outside 0..{len(dataset) - 1}")

        features = dataset.records[index].features()
        payload, _ = state.cache.get_or_compute(
            parsed_method, features, lambda: _explain_bytes(state, parsed_method, features)
        )
        return Response(content=payload, media_type="application/json")

    @app.get("/api/scenario")
    def scenario() -> dict:
        return _scenario_payload()

    @app.post("/api/refresh")
    def refresh() -> dict:
        try:
            state.load_dataset(state.data_path)
        except FileNotFoundError as exc:
            raise ApiError(400, "bad_data", f"data file not found: {state.data_path}") from exc
        except DatasetError as exc:
            raise ApiError(400, "bad_data", str(exc)) from exc
        assert state.dataset is not None
        return {"rows": len(state.dataset)}

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:

        @app.get("/")
        def root() -> dict:
            return {"service": "trafficxai", "ready": state.ready}

    return app
