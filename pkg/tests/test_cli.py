from __future__ import annotations

import json
import sqlite3
from pathlib import Path

import pytest
from click.testing import CliRunner

from ocelbridge.cli import cli, resolve_root
from ocelbridge.ocel import write_ocel
from ocelbridge.payloads import EXIT_CODES

from .conftest import make_log

CSV = (
    "sensor_id,measurement,value,recorded_at,event_id,object_id\n"
    "sc-1,weight,10.5,2024-05-01T08:01:00Z,e2,o1\n"
    "sc-1,weight,11.5,2024-05-01T08:01:15Z,e2,o1\n"
    "sc-1,weight,12.5,2024-05-01T08:01:30Z,e2,o1\n"
    "sc-1,weight,13.5,2024-05-01T08:01:45Z,e2,o1\n"
    "sc-1,weight,nope,2024-05-01T08:02:00Z,e2,o1\n"
)

SPEC = {
    "device_type": "unknown",
    "pattern": "event_attribute",
    "target": "Pack Item",
    "attribute_name": "measured_weight",
    "correlation": {"mode": "explicit_event_key"},
    "manipulation": {"kind": "aggregate", "agg_fn": "average"},
}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def root(tmp_path, runner):
    """Initialized workspace with tiny store attached and readings ingested."""
    root = tmp_path / "ws"
    store = tmp_path / "seed.sqlite"
    write_ocel(make_log(), store)
    csv = tmp_path / "readings.csv"
    csv.write_text(CSV)
    for args in (["ws", "init"], ["ocel", "attach", str(store)],
                 ["iot", "ingest", str(csv)]):
        result = runner.invoke(cli, ["-w", str(root)] + args)
        assert result.exit_code == 0, result.output
    return root


def run(runner, root, args):
    return runner.invoke(cli, ["-w", str(root)] + args)


def run_json(runner, root, args):
    result = run(runner, root, args + ["--json"])
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


# ---------------------------------------------------------------- root resolution


def test_root_precedence_flag_wins(monkeypatch, tmp_path):
    monkeypatch.setenv("OCELBRIDGE_WORKSPACE", str(tmp_path / "from-env"))
    assert resolve_root("explicit") == Path("explicit")


def test_root_precedence_env_beats_config(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "ocelbridge.json").write_text('{"workspace": "from-config"}')
    monkeypatch.setenv("OCELBRIDGE_WORKSPACE", "from-env")
    assert str(resolve_root(None)) == "from-env"


def test_root_precedence_config_then_default(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("OCELBRIDGE_WORKSPACE", raising=False)
    (tmp_path / "ocelbridge.json").write_text('{"workspace": "from-config"}')
    assert str(resolve_root(None)) == "from-config"
    (tmp_path / "ocelbridge.json").write_text("not json")
    assert str(resolve_root(None)) == "workspace"


# ---------------------------------------------------------------- commands


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "ocelbridge" in result.output


def test_ws_init_and_empty_jobs(runner, tmp_path):
    root = tmp_path / "ws"
    result = run(runner, root, ["ws", "init"])
    assert result.exit_code == 0
    assert "workspace ready" in result.output
    result = run(runner, root, ["ws", "jobs"])
    assert "(ledger empty)" in result.output


def test_ws_jobs_lists_ledger(runner, root):
    payload = run_json(runner, root, ["ws", "jobs"])
    kinds = [j["kind"] for j in payload["jobs"]]
    assert "explore" in kinds and "normalize" in kinds


def test_ocel_stats_human_and_json(runner, root):
    result = run(runner, root, ["ocel", "stats"])
    assert "events: 4  objects: 3" in result.output
    payload = run_json(runner, root, ["ocel", "stats"])
    assert payload["per_activity_counts"] == {
        "Create Order": 2, "Pack Item": 1, "Ship Order": 1}


def test_ocel_stats_without_store_exits_not_found(runner, tmp_path):
    root = tmp_path / "ws"
    run(runner, root, ["ws", "init"])
    result = run(runner, root, ["ocel", "stats"])
    assert result.exit_code == EXIT_CODES["not_found"]
    assert "error[not_found]" in result.output


def test_error_json_goes_to_stderr_as_payload(runner, tmp_path):
    root = tmp_path / "ws"
    run(runner, root, ["ws", "init"])
    result = runner.invoke(cli, ["-w", str(root), "ocel", "stats", "--json"])
    assert result.exit_code == EXIT_CODES["not_found"]
    body = json.loads(result.output)
    assert body["error"]["code"] == "not_found"


def test_ocel_dfg(runner, root):
    result = run(runner, root, ["ocel", "dfg", "--object-type", "Order"])
    assert "Create Order -> Pack Item  [1]" in result.output
    result = run(runner, root, ["ocel", "dfg", "--object-type", "Spaceship"])
    assert result.exit_code == EXIT_CODES["not_found"]


def test_ocel_validate_sound(runner, root):
    result = run(runner, root, ["ocel", "validate"])
    assert result.exit_code == 0
    assert "store is sound" in result.output


def test_ocel_validate_rejects_corrupted_store(runner, root):
    # dangling e2o rows are refused by the loader itself, same exit code
    store = root / "processed" / "store.sqlite"
    with sqlite3.connect(store) as conn:
        conn.execute("INSERT INTO event_object VALUES ('zz', 'o1', 'q')")
    result = run(runner, root, ["ocel", "validate"])
    assert result.exit_code == EXIT_CODES["integrity"]
    assert "error[integrity]" in result.output


def test_iot_infer(runner, root, tmp_path):
    csv = tmp_path / "more.csv"
    csv.write_text(CSV)
    result = run(runner, root, ["iot", "infer", str(csv)])
    assert result.exit_code == 0
    assert "suggested mapping:" in result.output
    assert "device_id" in result.output
    payload = run_json(runner, root, ["iot", "infer", str(csv)])
    assert payload["mapping"]["columns"]["result_time"] == "recorded_at"


def test_iot_ingest_with_mapping_file(runner, tmp_path):
    """`iot ingest --mapping` accepts `iot infer --json` output unchanged."""
    root = tmp_path / "ws"
    run(runner, root, ["ws", "init"])
    csv = tmp_path / "readings.csv"
    csv.write_text(CSV)
    inferred = run_json(runner, root, ["iot", "infer", str(csv)])
    mapping_file = tmp_path / "mapping.json"
    mapping_file.write_text(json.dumps(inferred))
    payload = run_json(runner, root, [
        "iot", "ingest", str(csv), "--mapping", str(mapping_file)])
    assert payload["readings"] == 4
    assert payload["rejects"] == 1


def test_iot_ingest_replay_marker(runner, root, tmp_path):
    csv = tmp_path / "again.csv"
    csv.write_text(CSV)
    result = run(runner, root, ["iot", "ingest", str(csv)])
    assert "(replayed)" in result.output  # same bytes as the fixture ingest


def test_iot_summary(runner, root):
    payload = run_json(runner, root, ["iot", "summary"])
    assert payload["reading_count"] == 4
    result = run(runner, root, ["iot", "summary"])
    assert "4 readings across 1 devices" in result.output


def test_integrate_plan_and_run(runner, root, tmp_path):
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(SPEC))
    plan = run_json(runner, root, ["integrate", "plan", "--spec", str(spec_file)])
    assert plan["preview_values"] == [["e2", 12.0]]

    report = run_json(runner, root, ["integrate", "run", "--plan", plan["plan_id"]])
    assert report["report"]["attribute_writes"] == 1

    # the plan was minted against the pre-apply store; it is spent now
    result = run(runner, root, ["integrate", "run", "--plan", plan["plan_id"]])
    assert result.exit_code == EXIT_CODES["plan_invalidated"]


def test_integrate_plan_bad_spec_exit_code(runner, root, tmp_path):
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(dict(SPEC, pattern="nonsense")))
    result = run(runner, root, ["integrate", "plan", "--spec", str(spec_file)])
    assert result.exit_code == EXIT_CODES["spec"]
    assert "error[spec] at pattern:" in result.output


def test_integrate_plan_collision_exit_code(runner, root, tmp_path):
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(dict(SPEC, attribute_name="station")))
    result = run(runner, root, ["integrate", "plan", "--spec", str(spec_file)])
    assert result.exit_code == EXIT_CODES["collision"]


def test_scenario_generate(runner, tmp_path):
    out = tmp_path / "scn"
    result = runner.invoke(cli, [
        "scenario", "generate", "--seed", "5", "--out", str(out),
        "--trucks", "3", "--corruptions", "2", "--json"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    for key in ("store", "gps", "weights", "ground_truth"):
        assert Path(payload[key]).is_file()


def test_scenario_generate_bad_params(runner, tmp_path):
    result = runner.invoke(cli, [
        "scenario", "generate", "--seed", "5", "--out", str(tmp_path / "x"),
        "--trucks", "0"])
    assert result.exit_code == EXIT_CODES["param"]
