"""Record live API payloads into frontend/fixtures/.

The UI tests replay these files instead of talking to a server, so every
assertion in the frontend suite is pinned to what the backend actually
returns. Re-run after changing any payload:

    python frontend/scripts/record_fixtures.py
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from ocelbridge.api.app import create_app
from ocelbridge.scenario.generate import ScenarioParams, generate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

BASE_SPEC = {
    "device_type": "scale",
    "pattern": "event_attribute",
    "target": "Weigh Loaded",
    "attribute_name": "checked_kg",
    "correlation": {"mode": "explicit_event_key"},
    "manipulation": {"kind": "aggregate", "agg_fn": "min"},
}

# Specs the server must refuse, one defect each. The recorder stores the
# server's verdict; the UI tests then require the client-side validator to
# flag the same field.
INVALID_SPECS = [
    ("unknown top-level key",
     dict(BASE_SPEC, bogus=1)),
    ("correlation missing",
     {k: v for k, v in BASE_SPEC.items() if k != "correlation"}),
    ("unknown correlation key",
     dict(BASE_SPEC, correlation={"mode": "explicit_event_key", "surprise": 1})),
    ("correlation mode missing",
     dict(BASE_SPEC, correlation={})),
    ("unknown correlation mode",
     dict(BASE_SPEC, correlation={"mode": "psychic"})),
    ("time window without bounds",
     dict(BASE_SPEC, correlation={"mode": "time_window", "window_after_s": 60})),
    ("negative window",
     dict(BASE_SPEC, correlation={"mode": "time_window", "window_before_s": 60,
                                  "window_after_s": -5})),
    ("non-numeric window",
     dict(BASE_SPEC, correlation={"mode": "time_window", "window_before_s": "soon",
                                  "window_after_s": 60})),
    ("window on a keyed mode",
     dict(BASE_SPEC, correlation={"mode": "explicit_event_key", "window_before_s": 60,
                                  "window_after_s": 60})),
    ("manipulation missing",
     {k: v for k, v in BASE_SPEC.items() if k != "manipulation"}),
    ("unknown manipulation key",
     dict(BASE_SPEC, manipulation={"kind": "raw", "extra": True})),
    ("unknown manipulation kind",
     dict(BASE_SPEC, manipulation={"kind": "transmogrify"})),
    ("raw with aggregation function",
     dict(BASE_SPEC, manipulation={"kind": "raw", "agg_fn": "min"})),
    ("raw with range",
     dict(BASE_SPEC, manipulation={"kind": "raw",
                                   "range": {"lower": 0, "upper": 1}})),
    ("unknown aggregation function",
     dict(BASE_SPEC, manipulation={"kind": "aggregate", "agg_fn": "mode"})),
    ("aggregate with range",
     dict(BASE_SPEC, manipulation={"kind": "aggregate", "agg_fn": "min",
                                   "range": {"lower": 0, "upper": 1}})),
    ("filter without range",
     dict(BASE_SPEC, manipulation={"kind": "filter_then_aggregate",
                                   "agg_fn": "min"})),
    ("range bounds reversed",
     dict(BASE_SPEC, manipulation={"kind": "filter_then_aggregate", "agg_fn": "min",
                                   "range": {"lower": 9, "upper": 1}})),
    ("unknown range key",
     dict(BASE_SPEC, manipulation={"kind": "filter_then_aggregate", "agg_fn": "min",
                                   "range": {"lower": 0, "upper": 1, "middle": 0.5}})),
    ("unknown pattern",
     dict(BASE_SPEC, pattern="row_attribute")),
]

# Specs the server must accept; the client-side validator has to agree.
VALID_SPECS = [
    ("raw object attribute",
     {"device_type": "gps", "pattern": "object_attribute", "target": "Truck",
      "attribute_name": "ctl_raw",
      "correlation": {"mode": "explicit_object_key"},
      "manipulation": {"kind": "raw"}}),
    ("aggregate with explicit windows left null",
     dict(BASE_SPEC, attribute_name="ctl_max",
          correlation={"mode": "explicit_event_key", "window_before_s": None,
                       "window_after_s": None, "object_type_scope": None},
          manipulation={"kind": "aggregate", "agg_fn": "max", "range": None})),
    ("filtered aggregate over a time window",
     {"device_type": "scale", "pattern": "event_attribute",
      "target": "Weigh Empty", "attribute_name": "ctl_filter",
      "correlation": {"mode": "time_window", "window_before_s": 3600,
                      "window_after_s": 3600},
      "manipulation": {"kind": "filter_then_aggregate", "agg_fn": "min",
                       "range": {"lower": 0, "upper": 100000}},
      "qualifier": "derived-from", "materialize_devices": True}),
]


def save(name: str, payload) -> None:
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def upload(client: TestClient, data: bytes, name: str) -> str:
    r = client.post(f"/api/v1/uploads?name={name}", content=data)
    assert r.status_code == 200, r.text
    return r.json()["sha256"]


def main() -> int:
    FIXTURES.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        tmp_path = Path(tmp)
        artifacts = generate(
            ScenarioParams(seed=42, truck_count=4, plan_count=2,
                           anomaly_rate=0.25, corruption_count=3),
            tmp_path / "scenario")

        client = TestClient(create_app(tmp_path / "ws"))
        assert client.post("/api/v1/workspace").status_code == 200

        store_sha = upload(client, artifacts.store_path.read_bytes(), "scenario.sqlite")
        r = client.post("/api/v1/ocel/attach", json={"upload": store_sha})
        assert r.status_code == 200, r.text

        r = client.get("/api/v1/ocel/stats")
        assert r.status_code == 200, r.text
        save("stats.json", r.json())

        r = client.get("/api/v1/ocel/dfg", params={"object_type": "Truck"})
        assert r.status_code == 200, r.text
        save("dfg_truck.json", r.json())

        weights_sha = upload(client, artifacts.weight_path.read_bytes(), "weights.csv")
        gps_sha = upload(client, artifacts.gps_path.read_bytes(), "gps.csv")

        r = client.post("/api/v1/iot/infer", json={"upload": weights_sha})
        assert r.status_code == 200, r.text
        save("mapping.json", r.json())

        r = client.post("/api/v1/iot/ingest",
                        json={"upload": weights_sha, "name": "weights.csv"})
        assert r.status_code == 200, r.text
        r = client.post("/api/v1/iot/ingest",
                        json={"upload": gps_sha, "name": "gps.csv"})
        assert r.status_code == 200, r.text
        assert r.json()["rejects"] > 0, "gps fixture should carry rejects"
        save("ingest.json", r.json())

        r = client.get("/api/v1/iot/summary")
        assert r.status_code == 200, r.text
        save("summary.json", r.json())

        r = client.post("/api/v1/integrations/plan", json={"spec": BASE_SPEC})
        assert r.status_code == 200, r.text
        plan = r.json()
        assert plan["preview_values"], "plan fixture should preview values"
        save("plan.json", plan)

        verdicts = {"invalid": [], "valid": []}
        for name, spec in INVALID_SPECS:
            r = client.post("/api/v1/integrations/plan", json={"spec": spec})
            assert r.status_code == 422, f"{name}: {r.status_code} {r.text}"
            verdicts["invalid"].append(
                {"name": name, "spec": spec, "error": r.json()["error"]})
        for name, spec in VALID_SPECS:
            r = client.post("/api/v1/integrations/plan", json={"spec": spec})
            assert r.status_code == 200, f"{name}: {r.status_code} {r.text}"
            verdicts["valid"].append({"name": name, "spec": spec})
        save("spec_verdicts.json", verdicts)

        r = client.post(f"/api/v1/integrations/plans/{plan['plan_id']}/execute")
        assert r.status_code == 200, r.text
        save("run.json", r.json())

        r = client.get("/api/v1/jobs")
        assert r.status_code == 200, r.text
        save("jobs.json", r.json())

    return 0


if __name__ == "__main__":
    sys.exit(main())
