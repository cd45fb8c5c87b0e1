"""HTTP API behavior: caching, error codes, scenario metadata."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from fastapi.testclient import TestClient

from trafficxai.dataset import feature_matrix, parse_csv
from trafficxai.forest import load_forest_file
from trafficxai.service import ExplanationCache, create_app
from trafficxai.explanations import ExplanationMethod

METHODS = [m.value for m in ExplanationMethod]


@pytest.fixture
def fixture_csv_path(tmp_path, small_dataset):
    from trafficxai.dataset import write_csv

    path = tmp_path / "inference.csv"
    path.write_text(write_csv(small_dataset), encoding="utf-8")
    return str(path)


@pytest.fixture
def client(model_file, fixture_csv_path):
    app = create_app(model_path=model_file, data_path=fixture_csv_path)
    return TestClient(app)


class TestHealth:
    def test_fresh_boot(self, client):
        doc = client.get("/api/health").json()
        assert doc["ready"] is True
        assert doc["model_loaded"] is True
        assert doc["rows"] == 200
        assert doc["cache"] == {"hits": 0, "misses": 0}

    def test_not_ready_without_model(self, fixture_csv_path, tmp_path):
        app = create_app(model_path=str(tmp_path / "missing"), data_path=fixture_csv_path)
        c = TestClient(app)
        assert c.get("/api/health").json()["ready"] is False
        assert c.get("/api/health").status_code == 200

    def test_counters_after_one_explanation(self, client):
        client.get("/api/explanations/0?method=shap-simplified")
        assert client.get("/api/health").json()["cache"]["misses"] == 1


class TestPredictions:
    def test_shape_and_fields(self, client):
        rows = client.get("/api/predictions").json()
        assert isinstance(rows, list) and len(rows) == 200
        assert set(rows[0]) == {"row_id", "pred_flow", "city", "detector", "speed", "occupancy"}
        assert [r["row_id"] for r in rows] == list(range(200))

    def test_pred_flow_matches_direct_predict(self, client, model_file, small_dataset):
        forest = load_forest_file(model_file)
        expected = forest.predict_batch(feature_matrix(small_dataset))
        rows = client.get("/api/predictions").json()
        for i in (0, 7, 42, 199):
            assert rows[i]["pred_flow"] == pytest.approx(float(expected[i]), abs=1e-9)

    def test_not_ready_returns_503(self, fixture_csv_path, tmp_path):
        app = create_app(model_path=str(tmp_path / "missing"), data_path=fixture_csv_path)
        c = TestClient(app)
        resp = c.get("/api/predictions")
        assert resp.status_code == 503
        body = resp.json()
        assert set(body) == {"error", "detail"}
        assert body["error"] == "not_ready"


class TestExplanations:
    def test_all_four_methods_accepted(self, client):
        for method in METHODS:
            resp = client.get(f"/api/explanations/3?method={method}")
            assert resp.status_code == 200
            doc = resp.json()
            assert doc["method"] == method
            assert doc["summary_text"]
            assert len(doc["ranked_items"]) == 3

    def test_unknown_method_is_400(self, client):
        resp = client.get("/api/explanations/0?method=gradcam")
        assert resp.status_code == 400
        body = resp.json()
        assert body["error"] == "unknown_method"
        for method in METHODS:
            assert method in body["detail"]

    def test_missing_method_is_400(self, client):
        assert client.get("/api/explanations/0").status_code == 400

    def test_non_integer_row_is_400(self, client):
        resp = client.get("/api/explanations/zebra?method=shap-simplified")
        assert resp.status_code == 400
        assert resp.json()["error"] == "bad_row_id"

    def test_out_of_range_row_is_404(self, client):
        resp = client.get("/api/explanations/100000?method=shap-simplified")
        assert resp.status_code == 404
        assert resp.json()["error"] == "row_not_found"

    def test_negative_row_is_404(self, client):
        assert client.get("/api/explanations/-1?method=shap-simplified").status_code == 404

    def test_miss_then_hit_byte_identical(self, client):
        first = client.get("/api/explanations/5?method=shap-detailed")
        stats1 = client.get("/api/health").json()["cache"]
        second = client.get("/api/explanations/5?method=shap-detailed")
        stats2 = client.get("/api/health").json()["cache"]
        assert first.content == second.content
        assert stats1 == {"hits": 0, "misses": 1}
        assert stats2 == {"hits": 1, "misses": 1}

    def test_methods_never_share_cache_entries(self, client):
        a = client.get("/api/explanations/2?method=lime-simplified")
        b = client.get("/api/explanations/2?method=lime-detailed")
        assert a.content != b.content
        assert client.get("/api/health").json()["cache"]["misses"] == 2

    def test_duplicate_features_share_one_entry(self, model_file, tmp_path):
        # two rows with identical (interval, occ, speed) but different detid
        text = (
            "day,interval,detid,flow,occ,speed,city\n"
            "2015-09-21,3600,d001,100,0.2,50,basel\n"
            "2015-09-21,3600,d002,100,0.2,50,bern\n"
        )
        path = tmp_path / "dupes.csv"
        path.write_text(text, encoding="utf-8")
        c = TestClient(create_app(model_path=model_file, data_path=str(path)))
        a = c.get("/api/explanations/0?method=shap-simplified")
        b = c.get("/api/explanations/1?method=shap-simplified")
        assert a.content == b.content
        assert c.get("/api/health").json()["cache"] == {"hits": 1, "misses": 1}

    def test_concurrent_identical_requests_store_once(self, client):
        def fetch(_):
            return client.get("/api/explanations/9?method=lime-detailed").content

        with ThreadPoolExecutor(max_workers=8) as pool:
            payloads = list(pool.map(fetch, range(16)))
        assert len(set(payloads)) == 1
        stats = client.get("/api/health").json()["cache"]
        assert stats["misses"] == 1
        assert stats["hits"] + stats["misses"] == 16


class TestScenario:
    def test_study_configuration(self, client):
        doc = client.get("/api/scenario").json()
        assert doc["impact"] == "Third-Party AI"
        assert doc["function"] == "Descriptive AI"
        assert doc["transparency"] == "Black-Box AI"
        assert doc["reasoning"] == "Deductive Reasoning"
        assert doc["persona"]["name"] == "Caroline"
        assert doc["button_label"] == "Get Traffic Flow Prediction and Location Details"

    def test_method_options_served(self, client):
        doc = client.get("/api/scenario").json()
        assert [m["value"] for m in doc["methods"]] == METHODS
        assert doc["methods"][3]["label"] == "SHAP - Detailed Explanation"

    def test_stable_across_calls(self, client):
        assert client.get("/api/scenario").json() == client.get("/api/scenario").json()


class TestRefresh:
    def test_refresh_picks_up_new_rows(self, model_file, tmp_path, small_dataset):
        from trafficxai.dataset import write_csv

        path = tmp_path / "live.csv"
        text = write_csv(small_dataset)
        path.write_text(text, encoding="utf-8")
        c = TestClient(create_app(model_path=model_file, data_path=str(path)))
        assert len(c.get("/api/predictions").json()) == 200

        extra = "2015-09-21,100,dnew,5,0.05,10,basel\n"
        path.write_text(text + extra, encoding="utf-8")
        assert c.post("/api/refresh").json() == {"rows": 201}
        assert len(c.get("/api/predictions").json()) == 201

    def test_refresh_bad_file_is_400(self, model_file, tmp_path):
        path = tmp_path / "gone.csv"
        path.write_text("day,interval,detid,flow,occ,speed,city\n2015-09-21,1,d,1,0.1,1,x\n")
        c = TestClient(create_app(model_path=model_file, data_path=str(path)))
        path.unlink()
        assert c.post("/api/refresh").status_code == 400


class TestStatic:
    def test_json_root_without_ui(self, client):
        doc = client.get("/").json()
        assert doc["service"] == "trafficxai"

    def test_static_ui_mounted_when_present(self, model_file, fixture_csv_path, tmp_path):
        ui = tmp_path / "dist"
        ui.mkdir()
        (ui / "index.html").write_text("<!doctype html><title>t</title>ok")
        c = TestClient(create_app(model_path=model_file, data_path=fixture_csv_path, ui_dir=str(ui)))
        resp = c.get("/")
        assert resp.status_code == 200
        assert "ok" in resp.text
        # API routes still win over the static mount
        assert c.get("/api/health").json()["ready"] is True


class TestCacheUnit:
    def test_key_depends_on_method_and_features(self):
        k1 = ExplanationCache.key(ExplanationMethod.SHAP_DETAILED, (1.0, 2.0, 3.0))
        k2 = ExplanationCache.key(ExplanationMethod.SHAP_SIMPLIFIED, (1.0, 2.0, 3.0))
        k3 = ExplanationCache.key(ExplanationMethod.SHAP_DETAILED, (1.0, 2.0, 3.5))
        k4 = ExplanationCache.key(ExplanationMethod.SHAP_DETAILED, (1.0, 2.0, 3.0))
        assert k1 != k2 and k1 != k3 and k1 == k4

    def test_insert_once_semantics(self):
        cache = ExplanationCache()
        calls = []

        def compute():
            calls.append(1)
            return b"payload"

        a, hit_a = cache.get_or_compute(ExplanationMethod.LIME_SIMPLIFIED, (1.0, 2.0, 3.0), compute)
        b, hit_b = cache.get_or_compute(ExplanationMethod.LIME_SIMPLIFIED, (1.0, 2.0, 3.0), compute)
        assert (a, hit_a) == (b"payload", False)
        assert (b, hit_b) == (b"payload", True)
        assert len(calls) == 1
        assert cache.stats() == {"hits": 1, "misses": 1}

    def test_float_key_uses_exact_bits(self):
        k_zero = ExplanationCache.key(ExplanationMethod.LIME_SIMPLIFIED, (0.0, 0.0, 0.0))
        k_negzero = ExplanationCache.key(ExplanationMethod.LIME_SIMPLIFIED, (-0.0, 0.0, 0.0))
        assert k_zero != k_negzero
