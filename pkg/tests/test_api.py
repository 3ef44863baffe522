"""HTTP API: маршруты, статусы ошибок и форма ответов"""
import math

import pytest
from fastapi.testclient import TestClient

from nonuniform_sobolev import __version__
from nonuniform_sobolev.main import app


@pytest.fixture
def client():
    with TestClient(app) as test_client:
        yield test_client


@pytest.mark.integration
class TestService:
    def test_root(self, client):
        response = client.get("/")
        assert response.status_code == 200
        assert response.json() == {"service": "Nonuniform Sobolev", "version": __version__, "status": "running"}

    def test_health(self, client):
        body = client.get("/api/health").json()
        assert body["status"] == "ok"
        assert body["threads"] >= 1

    def test_health_checks(self, client):
        body = client.get("/api/health/checks").json()
        assert "acceptance.bootstrap" in body["acceptance"]
        assert body["checks_count"] == len(body["acceptance"]) + len(body["property"])


@pytest.mark.integration
class TestIndicesApi:
    def test_operations(self, client):
        operations = client.get("/api/indices").json()["operations"]
        assert "conjugate" in operations
        assert "recursion" in operations

    def test_beta(self, client):
        response = client.post("/api/indices/beta", json={"s": 1.5, "p": ["3/2"]})
        assert response.status_code == 200
        assert response.json()["value"]["beta"] == "5/4"

    def test_embed(self, client):
        body = client.post("/api/indices/embed", json={"N": 3, "k": 1, "p": "2,2"}).json()
        assert body["text"] == "subcritical q∈[2,6]"
        assert body["trace"][0]["holds"] is True

    def test_precondition_is_bad_request(self, client):
        response = client.post("/api/indices/conjugate", json={"N": 3, "k": 2, "p": "2"})
        assert response.status_code == 400
        assert response.json()["details"]["inequality"] == "k·p < N"

    def test_unknown_operation(self, client):
        response = client.post("/api/indices/volume", json={})
        assert response.status_code == 422
        assert response.json()["details"]["field"] == "indices.operation"

    def test_extra_fields_rejected(self, client):
        response = client.post("/api/indices/conjugate", json={"N": 3, "p": "2", "q": "6"})
        assert response.status_code == 422
        assert isinstance(response.json()["detail"], list)


@pytest.mark.integration
class TestNormsApi:
    def test_lp(self, client):
        response = client.post("/api/norms/lp", json={"field": {"family": "gaussian"}, "p": 1})
        assert response.status_code == 200
        body = response.json()
        assert body["kind"] == "lp"
        assert body["config_echo"]["norm"]["p"] == "1"
        assert body["result"]["value"] == pytest.approx(math.sqrt(math.pi), rel=1e-6)

    def test_seed_query(self, client):
        body = client.post("/api/norms/lp?seed=5", json={"field": {"family": "gaussian"}}).json()
        assert body["config_echo"]["global"]["seed"] == 5

    def test_missing_smoothness(self, client):
        response = client.post("/api/norms/gagliardo", json={"field": {"family": "gaussian"}})
        assert response.status_code == 422
        assert response.json()["details"]["field"] == "norm.s"

    def test_unknown_family(self, client):
        response = client.post("/api/norms/lp", json={"field": {"family": "cube"}})
        assert response.status_code == 422

    def test_unknown_kind(self, client):
        response = client.post("/api/norms/sup", json={"field": {"family": "gaussian"}})
        assert response.status_code == 422

    def test_missing_file_is_bad_request(self, client, tmp_path):
        field = {"family": "file", "path": str(tmp_path / "absent.bin")}
        response = client.post("/api/norms/lp", json={"field": field})
        assert response.status_code == 400


@pytest.mark.integration
class TestExperimentsApi:
    def test_heat(self, client):
        payload = {
            "field": {"family": "gaussian", "grid": {"L": 16, "n": 256}},
            "s": "1",
            "p": "2,2",
            "times": [0.1],
            "include_weighted": False,
        }
        response = client.post("/api/experiments/heat", json=payload)
        assert response.status_code == 200
        body = response.json()
        assert "generated_at" not in body
        assert body["name"] == "heat"
        assert [row["t"] for row in body["rows"]] == [0.0, 0.1]

    def test_heat_invalid_q(self, client):
        payload = {"field": {"grid": {"L": 16, "n": 256}}, "s": "1", "p": "2,2", "times": [0.1], "q_list": ["1"]}
        response = client.post("/api/experiments/heat", json=payload)
        assert response.status_code == 422
        assert response.json()["details"]["field"] == "heat.q_list"

    def test_verify_selected(self, client):
        response = client.post("/api/experiments/verify", json={"checks": ["acceptance.index_table"]})
        assert response.status_code == 200
        body = response.json()
        assert body["summary"] == {"pass": 1, "fail": 0, "skip": 0}
        assert body["outcomes"][0]["name"] == "acceptance.index_table"

    def test_verify_unknown_check(self, client):
        response = client.post("/api/experiments/verify", json={"checks": ["acceptance.nothing"]})
        assert response.status_code == 422
        assert response.json()["details"]["field"] == "verify.checks"
