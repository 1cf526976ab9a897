from conftest import open_rows
from semnav.core.scenario_generator import ScenarioParams, generate_scenario
from semnav.core.scenario_io import dump_scenario

NEAR_TARGET = """semnav-scenario v1
8 5 0.25
########
#......#
#.S.T..#
#......#
########
target_label: chair
"""


def test_root_and_health(api_client):
    root = api_client.get("/")
    assert root.status_code == 200
    assert root.json()["message"] == "SemNav API"

    health = api_client.get("/health")
    assert health.json() == {"status": "healthy", "database": "connected"}


def test_generated_scenario_text(api_client):
    response = api_client.get("/api/v1/scenarios/7", params={"preset": "small"})
    assert response.status_code == 200
    assert response.text == dump_scenario(generate_scenario(7, ScenarioParams.from_preset("small")))

    assert api_client.get("/api/v1/scenarios/7", params={"preset": "castle"}).status_code == 400


def test_run_inline_episode(api_client):
    response = api_client.post(
        "/api/v1/episodes",
        json={"scenario_text": NEAR_TARGET, "scorer": "mock", "include_trace": True},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["success"] is True
    assert body["termination"] == "stop"
    assert body["spl"] == 1.0
    assert body["scenario"] == "inline"
    assert body["trace"][-1]["action"] == "STOP"


def test_episode_request_validation(api_client):
    assert api_client.post("/api/v1/episodes", json={}).status_code == 422
    assert api_client.post("/api/v1/episodes", json={"seed": 1, "scenario_text": NEAR_TARGET}).status_code == 422

    broken = NEAR_TARGET.replace("S", ".")
    response = api_client.post("/api/v1/episodes", json={"scenario_text": broken})
    assert response.status_code == 400
    assert "line" in response.json()["detail"]


def test_batch_lifecycle(api_client):
    response = api_client.post(
        "/api/v1/batches",
        json={"seeds": "0..1", "preset": "small", "planners": ["lsp", "greedy"], "max_steps": 40, "note": "smoke"},
    )
    assert response.status_code == 200
    created = response.json()
    assert created["scenario_count"] == 2
    assert [row["planner"] for row in created["rows"]] == ["lsp", "greedy"]
    assert all(row["episodes"] == 2 and row["spl"] <= row["sr"] for row in created["rows"])

    listing = api_client.get("/api/v1/batches").json()
    assert listing["total"] == 1
    assert listing["batches"][0]["batch_id"] == created["batch_id"]

    fetched = api_client.get(f"/api/v1/batches/{created['batch_id']}")
    assert fetched.status_code == 200
    assert fetched.json()["note"] == "smoke"


def test_batch_errors(api_client):
    assert api_client.get("/api/v1/batches/999").status_code == 404
    assert api_client.get("/api/v1/batches", params={"limit": 0}).status_code == 400

    external = api_client.post("/api/v1/batches", json={"seeds": "0..1", "scorer": "external"})
    assert external.status_code == 400

    too_many = api_client.post("/api/v1/batches", json={"seeds": "0..299", "planners": ["lsp", "greedy"]})
    assert too_many.status_code == 400
    assert "limit" in too_many.json()["detail"]

    bad_range = api_client.post("/api/v1/batches", json={"seeds": "9..2"})
    assert bad_range.status_code == 400


def test_unreachable_target_reports_null_oracle(api_client):
    rows = open_rows(16, 10, start=(4, 2), target=(4, 14), walls=[(r, 6) for r in range(1, 9)])
    text = "\n".join(["semnav-scenario v1", "16 10 0.25", *rows, "target_label: chair"]) + "\n"
    response = api_client.post("/api/v1/episodes", json={"scenario_text": text, "max_steps": 20})
    assert response.status_code == 200
    body = response.json()
    assert body["reachable"] is False
    assert body["oracle_shortest"] is None
    assert body["spl"] == 0.0
