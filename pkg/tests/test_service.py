import pytest
from fastapi.testclient import TestClient

import ltf_fourier.bounds as bounds
from ltf_fourier.harness import SoundnessError
from ltf_fourier.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


class TestAnalyzeEndpoint:
    def test_weights_form(self, client):
        r = client.post("/analyze", json={"weights": [0.0, 1.0, 1.0, 1.0]})
        assert r.status_code == 200
        body = r.json()
        assert body["record"]["entropy_bits"] == 2.0
        assert body["record"]["influence_exact"] == 1.5
        assert body["record"]["mode"] == "exact"
        assert body["warnings"] == []

    def test_ltf_form(self, client):
        r = client.post("/analyze",
                        json={"ltf": {"n": 3, "weights": [0.0, 1.0, 1.0, 1.0]}})
        assert r.status_code == 200

    def test_both_forms_rejected(self, client):
        r = client.post("/analyze", json={"weights": [0.0, 1.0],
                                          "ltf": {"n": 1, "weights": [0.0, 1.0]}})
        assert r.status_code == 422

    def test_neither_form_rejected(self, client):
        assert client.post("/analyze", json={}).status_code == 422

    def test_validation_maps_to_400(self, client):
        r = client.post("/analyze", json={"weights": [0.0, 0.0, 0.0]})
        assert r.status_code == 400
        body = r.json()
        assert body["kind"] == "validation"

    def test_unknown_fields_rejected(self, client):
        r = client.post("/analyze", json={"weights": [0.0, 1.0], "frobnicate": 1})
        assert r.status_code == 422

    def test_estimate_mode_warning(self, client):
        r = client.post("/analyze", json={"weights": [0.0] + [1.0] * 24,
                                          "mc_samples": 10_000})
        assert r.status_code == 200
        body = r.json()
        assert body["record"]["mode"] == "estimate"
        assert body["warnings"]


class TestBoundsEndpoint:
    def test_basic_suite(self, client):
        r = client.post("/bounds", json={"weights": [0.0] + [1.0] * 9, "alpha": 1.0})
        assert r.status_code == 200
        names = [rep["name"] for rep in r.json()["reports"]]
        assert "khintchine_influence" in names
        assert "shevtsova_error" in names
        assert "interval_probability" in names
        assert "per_coordinate_thm3" in names
        assert "per_coordinate_homogeneous" in names

    def test_with_distribution(self, client):
        r = client.post("/bounds", json={"weights": [0.0] + [1.0] * 9,
                                         "distribution": {"kind": "normal"},
                                         "entropy_c": 2.0})
        assert r.status_code == 200
        body = r.json()
        names = [rep["name"] for rep in body["reports"]]
        assert "random_ltf_certificate" in names
        assert "entropy_upper_bound" in names
        assert body["bernstein"] is not None

    def test_report_shape(self, client):
        r = client.post("/bounds", json={"weights": [0.5, 1.0, -1.0, 2.0]})
        rep = r.json()["reports"][0]
        assert set(rep) == {"name", "value", "clamped", "side_conditions", "parameters"}


class TestExperimentEndpoint:
    def test_runs(self, client):
        r = client.post("/experiment", json={
            "distribution": {"kind": "uniform", "param": 1.0},
            "n_values": [4], "trials_per_n": 3, "master_seed": 5})
        assert r.status_code == 200
        body = r.json()
        assert len(body["records"]) == 3
        assert body["summary"]["records"] == 3

    def test_bad_config(self, client):
        r = client.post("/experiment", json={
            "distribution": {"kind": "uniform"}, "n_values": [],
            "trials_per_n": 3, "master_seed": 5})
        assert r.status_code in (400, 422)


class TestVerifyEndpoint:
    def test_passes(self, client):
        r = client.post("/verify", json={"n_max_exact": 8, "trials": 15, "seed": 0})
        assert r.status_code == 200
        body = r.json()
        assert body["passed"] is True
        assert len(body["checks"]) == 10

    def test_zero_trials(self, client):
        r = client.post("/verify", json={"trials": 0})
        assert r.status_code in (400, 422)


def test_soundness_maps_to_500(client, monkeypatch):
    import dataclasses

    real = bounds.khintchine_lower_bound

    def inflated(weights):
        r = real(weights)
        return dataclasses.replace(r, value=r.value + 10.0)

    monkeypatch.setattr(bounds, "khintchine_lower_bound", inflated)
    r = client.post("/analyze", json={"weights": [0.0, 1.0, 1.0, 1.0]})
    assert r.status_code == 500
    assert r.json()["kind"] == "soundness_violation"
