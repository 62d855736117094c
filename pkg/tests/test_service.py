import httpx
import pytest
from fastapi.testclient import TestClient

from coexsim.cli import main
from coexsim.golden import load_golden_text
from coexsim.service import app

client = TestClient(app)


def test_health():
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok" and "version" in body


def test_scenario_catalogue():
    body = client.get("/scenarios").json()
    assert "fig2" in body["builtin"]
    assert body["golden"] == ["fig2", "fig5b", "fig5c", "fig6"]


def test_scenario_detail_and_unknown():
    body = client.get("/scenarios/fig5c").json()
    assert body["simulation"]["name"] == "fig5c"
    assert client.get("/scenarios/fig999").status_code == 404


def test_run_builtin():
    resp = client.post("/runs", json={"builtin": "fig2"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["scenario"] == "fig2" and body["seed"] == 2
    assert body["trace"] is None
    assert body["compliance"]["ok"] is True


def test_run_with_trace_matches_archive():
    resp = client.post("/runs", json={"builtin": "fig2", "include_trace": True})
    assert resp.json()["trace"] == load_golden_text("fig2")


def test_run_with_overrides():
    resp = client.post("/runs", json={"builtin": "fig5c", "seed": 99,
                                      "duration_ms": 5})
    body = resp.json()
    assert body["seed"] == 99 and body["horizon_ns"] == 5_000_000


def test_run_requires_exactly_one_source():
    assert client.post("/runs", json={}).status_code == 422
    assert client.post(
        "/runs", json={"builtin": "fig2", "scenario": {}}).status_code == 422


def test_run_unknown_builtin_404():
    assert client.post("/runs", json={"builtin": "fig999"}).status_code == 404


def test_run_invalid_scenario_400():
    resp = client.post("/runs", json={"scenario": {"simulation": {
        "horizon_ns": 0}}})
    assert resp.status_code == 400
    assert "horizon_ns" in resp.json()["detail"]


def test_run_custom_scenario_body():
    body = {
        "scenario": {
            "simulation": {"name": "api-demo", "seed": 3,
                           "horizon_ns": 2_000_000},
            "wifi_nodes": [
                {"name": "A", "peer": "B",
                 "traffic": {"mode": "scripted", "frame_bits": 10_800,
                             "arrivals_ns": [0]}},
                {"name": "B"},
            ],
            "topology": {"energy": [[False, True], [True, False]],
                         "decode": [[False, True], [True, False]]},
        },
    }
    resp = client.post("/runs", json=body)
    assert resp.status_code == 200
    metrics = resp.json()["metrics"]
    assert metrics["nodes"]["A"]["bits_delivered"] == 10_800


def test_replay_endpoint():
    resp = client.post("/replays/fig6")
    assert resp.status_code == 200
    body = resp.json()
    assert body["ok"] is True and body["divergence_line"] is None
    assert client.post("/replays/fig999").status_code == 404


def test_audit_endpoint_clean_and_tampered():
    text = load_golden_text("fig5b")
    resp = client.post("/audits", json={"trace": text})
    assert resp.status_code == 200
    body = resp.json()
    assert body["ok"] is True and body["records"] == len(text.splitlines())

    tampered = text.replace("burst_end=10000000", "burst_end=10100000", 1)
    body = client.post("/audits", json={"trace": tampered}).json()
    assert body["ok"] is False
    assert body["report"]["violations"]


def test_audit_endpoint_rejects_garbage():
    resp = client.post("/audits", json={"trace": "not,a\nvalid trace"})
    assert resp.status_code == 400


# -- command line as a thin client of the service --------------------------------

@pytest.fixture
def cli_over_asgi(monkeypatch):
    """Route the CLI's HTTP calls into the app without a real socket."""
    def make_client(base_url="", timeout=None):
        return TestClient(app)

    def post(url, json=None, timeout=None, **kwargs):
        path = url.split("http://svc", 1)[1]
        with TestClient(app) as c:
            return c.post(path, json=json)

    monkeypatch.setattr(httpx, "Client", make_client)
    monkeypatch.setattr(httpx, "post", post)


def test_cli_run_against_server(cli_over_asgi, capsys):
    code = main(["run", "--builtin", "fig2", "--server", "http://svc",
                 "--check-compliance"])
    out = capsys.readouterr().out
    assert code == 0
    import json
    assert json.loads(out)["scenario"] == "fig2"


def test_cli_replay_against_server(cli_over_asgi, capsys):
    code = main(["replay", "fig2", "--server", "http://svc"])
    assert code == 0
    assert "replay fig2: ok" in capsys.readouterr().out


def test_cli_audit_against_server(cli_over_asgi, tmp_path, capsys):
    p = tmp_path / "t.trace"
    p.write_text(load_golden_text("fig5c"))
    code = main(["audit", str(p), "--server", "http://svc"])
    assert code == 0
    assert "audit: ok" in capsys.readouterr().out
