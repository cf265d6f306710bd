import json

import numpy as np
import pytest

pytest.importorskip("fastapi")
from fastapi.testclient import TestClient

from casemix.model import scenario_to_dict
from casemix.service import create_app
from casemix.store import from_scenario

from tables import DEMO_BASELINE, DEMO_BOUNDS, DEMO_MIX_FRACTIONS, MIX_A, MIX_B


@pytest.fixture(scope="module")
def client(demo):
    app = create_app(from_scenario(demo))
    with TestClient(app) as c:
        yield c


def _read_sse(response):
    events = []
    current = {}
    for line in response.iter_lines():
        if line.startswith("event:"):
            current["event"] = line.split(":", 1)[1].strip()
        elif line.startswith("data:"):
            current["data"] = json.loads(line.split(":", 1)[1])
        elif line == "" and current:
            events.append(current)
            current = {}
    if current:
        events.append(current)
    return events


def test_bounds_stream_progressive(client):
    with client.stream("GET", "/api/bounds") as response:
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/event-stream")
        events = _read_sse(response)
    bound_events = [e for e in events if e["event"] == "bound"]
    done = [e for e in events if e["event"] == "done"]
    assert len(bound_events) == 5
    assert [e["data"]["type"] for e in bound_events] == ["T1", "T2", "T3", "T4", "T5"]
    assert [round(e["data"]["bound"], 3) for e in bound_events] == pytest.approx(
        DEMO_BOUNDS, abs=0.01
    )
    assert len(done) == 1
    assert done[0]["data"]["bounds"] == pytest.approx(DEMO_BOUNDS, abs=0.01)


def test_scenario_round_trip(client, demo):
    doc = client.get("/api/scenario").json()
    assert doc["scenario"]["name"] == demo.name
    assert len(doc["scenario"]["patient_types"]) == 5
    put = client.put("/api/scenario", json={"scenario": doc["scenario"]})
    assert put.status_code == 200
    assert put.json()["fingerprint"] == doc["fingerprint"]


def test_solve_endpoint(client):
    res = client.post("/api/solve", json={"mix": list(DEMO_MIX_FRACTIONS)})
    assert res.status_code == 200
    body = res.json()
    assert body["total"] == pytest.approx(113.53, abs=0.05)
    assert body["case_mix"] == pytest.approx(DEMO_BASELINE, abs=0.05)
    assert body["utilization"]["OT"]["percent"] == pytest.approx(100.0, abs=0.1)


def test_feasible_endpoint(client):
    ok = client.post("/api/feasible", json={"mix": list(DEMO_BASELINE)}).json()
    assert ok["feasible"] is True
    bad = client.post("/api/feasible", json={"mix": [80, 0, 0, 0, 0]}).json()
    assert bad["feasible"] is False and bad["overloads"]


def test_alter_and_decision_flow(client):
    session = client.get("/api/session").json()
    t5 = session["current_mix"][4]
    res = client.post(
        "/api/alter", json={"type": "T5", "delta": 32.0 - t5, "method": "ssq"}
    )
    assert res.status_code == 200
    body = res.json()
    assert body["status"] == "ok"
    assert body["new_mix"][4] == pytest.approx(32.0, abs=1e-6)
    # solves are side-effect free until a decision lands
    assert client.get("/api/session").json()["current_mix"][4] == pytest.approx(t5)
    idx = body["entry_index"]
    decided = client.post(
        "/api/decision", json={"entry_index": idx, "decision": "accepted"}
    )
    assert decided.status_code == 200
    assert decided.json()["current_mix"][4] == pytest.approx(32.0, abs=1e-6)
    # a second decision on the same entry is refused
    again = client.post(
        "/api/decision", json={"entry_index": idx, "decision": "rejected"}
    )
    assert again.status_code == 422


def test_alter_zero_delta_is_validation_error(client):
    res = client.post("/api/alter", json={"type": "T5", "delta": 0.0, "method": "eq"})
    assert res.status_code == 422
    assert res.json()["error"]["code"] == "validation"


def test_alter_subtype_endpoint(client):
    res = client.post(
        "/api/alter-subtype", json={"sub_type": "T3-2", "delta": -1.0, "method": "eq"}
    )
    assert res.status_code == 200
    body = res.json()
    assert body["sub_deviations"] is not None


def test_infeasible_maps_to_conflict(client):
    res = client.post("/api/alter", json={"type": "T5", "delta": 1e6, "method": "eq"})
    # out of the permitted range: a validation error, not a crash
    assert res.status_code == 422


def test_compare_endpoint(client):
    res = client.post(
        "/api/compare",
        json={"a": list(MIX_A), "b": list(MIX_B), "upper": list(DEMO_BOUNDS)},
    )
    body = res.json()
    assert body["gain"] == pytest.approx(0.498, abs=0.005)
    assert body["loss"] == pytest.approx(0.144, abs=0.005)
    assert body["ratio"] == pytest.approx(3.465, abs=0.005)
    assert body["verdict"] == "b_preferred"
    sub = client.post(
        "/api/compare",
        json={
            "a": list(MIX_A),
            "b": list(MIX_B),
            "upper": list(DEMO_BOUNDS),
            "subset": ["T3", "T4", "T5"],
        },
    ).json()
    assert sub["verdict"] == "a_preferred"
    assert sub["subset"] == ["T3", "T4", "T5"]


def test_similarity_endpoint(client):
    body = client.post(
        "/api/similarity",
        json={"a": list(MIX_A), "b": list(MIX_B), "eps": [2.5, 9.6, 5.1, 0.5, 7.0]},
    ).json()
    assert body["los"] == pytest.approx(40.0)
    assert body["significant_types"] == ["T1", "T2", "T3"]


def test_proximity_endpoint(client):
    # the server's ideal is its own computed bounds; the published rounding
    # differs in the fourth decimal
    body = client.post("/api/proximity", json={"mix": list(DEMO_BOUNDS)}).json()
    assert body["proximity"] == pytest.approx(0.0, abs=0.01)
    assert body["progress"] == pytest.approx(100.0, abs=0.01)
    zero = client.post("/api/proximity", json={"mix": [0.0] * 5}).json()
    assert zero["proximity"] == pytest.approx(100.0, abs=1e-9)


def test_reads_are_idempotent(client):
    one = client.get("/api/scenario").json()
    two = client.get("/api/scenario").json()
    assert one == two


def test_alter_reproduces_study_row_on_study_scenario():
    # the alteration-study configuration reproduces the published row for
    # dragging T5 to 32 under the squared policy
    from casemix.fixtures import alteration_study_scenario

    app = create_app(from_scenario(alteration_study_scenario()))
    with TestClient(app) as study_client:
        session = study_client.get("/api/session").json()
        assert session["baseline_mix"] == pytest.approx(DEMO_BASELINE, abs=0.05)
        t5 = session["current_mix"][4]
        body = study_client.post(
            "/api/alter", json={"type": "T5", "delta": 32.0 - t5, "method": "ssq"}
        ).json()
        assert body["new_mix"] == pytest.approx([5.63, 48.28, 18.78, 9.23, 32.0], abs=0.1)
        assert body["total"] == pytest.approx(113.92, abs=0.1)


def test_sessions_persist_to_disk_on_mutation(demo, tmp_path):
    app = create_app(from_scenario(demo), state_dir=tmp_path)
    with TestClient(app) as c:
        body = c.post("/api/alter", json={"type": "T1", "delta": -1.0, "method": "eq"}).json()
        c.post("/api/decision", json={"entry_index": body["entry_index"], "decision": "accepted"})
    saved = json.loads((tmp_path / "session-main.json").read_text())
    assert saved["history"][0]["decision"] == "accepted"
    assert saved["current_mix"] == pytest.approx(body["new_mix"])


def test_session_replay_matches_current(client, demo):
    # replaying the accepted history from the baseline lands on current_mix
    from casemix.alteration import AlterationRequest, alter_type

    doc = client.get("/api/session").json()
    mix = np.array(doc["baseline_mix"])
    sub = [np.array(r) for r in doc["baseline_sub_mix"]]
    app_state = client.app.state.engine
    for entry in doc["history"]:
        if entry["decision"] != "accepted":
            continue
        req = AlterationRequest(
            baseline=mix,
            delta=entry["delta"],
            method=entry["method"],
            target_type=entry["target_type"],
            target_subtype=entry["target_subtype"],
            type_bounds=app_state.stored.ensure_type_bounds(),
            sub_type_bounds=app_state.stored.ensure_sub_type_bounds()
            if entry["target_subtype"]
            else None,
            baseline_sub_mix=sub,
        )
        res = alter_type(demo, req) if entry["target_subtype"] is None else None
        assert res is not None
        mix, sub = res.new_mix, res.new_sub_mix
    assert mix == pytest.approx(doc["current_mix"], abs=1e-6)
