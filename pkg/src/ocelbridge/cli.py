"""Command-line face of the toolkit.

Every command wraps one pipeline call and, with --json, prints exactly
the payload the HTTP API would return for the same operation. Errors map
to distinct exit codes per error class (see payloads.EXIT_CODES).
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import __version__, pipeline
from .errors import OcelBridgeError
from .iotschema.mapping import ColumnMapping
from .ocel.stats import directly_follows, log_statistics
from .payloads import (
    EXIT_CODES,
    dfg_payload,
    error_payload,
    job_payload,
    stats_payload,
)
from .workspace.workspace import init_workspace, load_ledger, open_workspace

CONFIG_FILE = "ocelbridge.json"
DEFAULT_ROOT = "workspace"


def resolve_root(flag_value: str | None) -> Path:
    """Workspace root precedence: flag > environment > config file > default."""
    if flag_value:
        return Path(flag_value)
    env = os.environ.get("OCELBRIDGE_WORKSPACE")
    if env:
        return Path(env)
    config = Path(CONFIG_FILE)
    if config.is_file():
        try:
            data = json.loads(config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            data = {}
        if isinstance(data, dict) and data.get("workspace"):
            return Path(data["workspace"])
    return Path(DEFAULT_ROOT)


def _emit(payload: dict, as_json: bool, human_lines) -> None:
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in human_lines(payload):
            click.echo(line)


def _fail(exc: OcelBridgeError, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(error_payload(exc), indent=2, sort_keys=True), err=True)
    else:
        where = f" at {exc.field_path}" if getattr(exc, "field_path", None) else ""
        click.echo(f"error[{exc.code}]{where}: {exc}", err=True)
    sys.exit(EXIT_CODES.get(exc.code, 1))


def _load_json_file(path: str) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


@click.group()
@click.version_option(version=__version__, prog_name="ocelbridge")
@click.option("--workspace", "-w", "workspace_flag", default=None,
              help="Workspace root (default: env OCELBRIDGE_WORKSPACE, "
                   f"then {CONFIG_FILE}, then ./{DEFAULT_ROOT}).")
@click.pass_context
def cli(ctx, workspace_flag):
    """Bring sensor readings into OCEL 2.0 event logs."""
    ctx.obj = {"root": resolve_root(workspace_flag)}


# ---------------------------------------------------------------- ws


@cli.group()
def ws():
    """Workspace management."""


@ws.command("init")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def ws_init(ctx, as_json):
    """Create the workspace directory layout."""
    try:
        workspace = init_workspace(ctx.obj["root"])
    except OcelBridgeError as exc:
        _fail(exc, as_json)
    payload = {"root": str(workspace.root)}
    _emit(payload, as_json, lambda p: [f"workspace ready at {p['root']}"])


@ws.command("jobs")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def ws_jobs(ctx, as_json):
    """List the job ledger."""
    try:
        workspace = open_workspace(ctx.obj["root"])
        payload = {"jobs": [job_payload(r) for r in load_ledger(workspace)]}
    except OcelBridgeError as exc:
        _fail(exc, as_json)
    _emit(payload, as_json, lambda p: [
        f"{j['job_id']}  {j['kind']:<10} {j['status']:<8} inputs={len(j['input_hashes'])}"
        for j in p["jobs"]] or ["(ledger empty)"])


# ---------------------------------------------------------------- iot


@cli.group()
def iot():
    """Sensor-table ingestion and summaries."""


@iot.command("infer")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def iot_infer(ctx, file, as_json):
    """Suggest a column mapping for a raw table."""
    from .workspace.workspace import stage_upload

    try:
        workspace = open_workspace(ctx.obj["root"])
        data = Path(file).read_bytes()
        _, sha = stage_upload(workspace, data, Path(file).name)
        payload = pipeline.infer_for_upload(workspace, sha)
    except OcelBridgeError as exc:
        _fail(exc, as_json)

    def human(p):
        lines = ["suggested mapping:"]
        for role, header in sorted(p["mapping"]["columns"].items()):
            lines.append(f"  {role:<12} <- {header}")
        for role, value in sorted(p["mapping"]["constants"].items()):
            lines.append(f"  {role:<12} := {value!r}")
        if p["unresolved"]:
            lines.append("unresolved required roles: " + ", ".join(p["unresolved"]))
        lines.extend(f"note: {n}" for n in p["notes"])
        return lines

    _emit(payload, as_json, human)


@iot.command("ingest")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mapping", "mapping_path", type=click.Path(exists=True, dir_okay=False),
              help="Column mapping JSON; inferred from headers when omitted.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def iot_ingest(ctx, file, mapping_path, as_json):
    """Normalize a raw sensor table into the workspace."""
    try:
        workspace = open_workspace(ctx.obj["root"])
        mapping = None
        if mapping_path:
            data = _load_json_file(mapping_path)
            if "columns" not in data and "mapping" in data:
                data = data["mapping"]  # accept `iot infer --json` output directly
            mapping = ColumnMapping.from_dict(data)
        result = pipeline.ingest_readings(
            workspace, Path(file).read_bytes(), Path(file).name, mapping)
        payload = pipeline.ingest_payload(result)
    except OcelBridgeError as exc:
        _fail(exc, as_json)

    def human(p):
        lines = [f"readings: {p['readings']}  rejects: {p['rejects']}"
                 + ("  (replayed)" if p["replayed"] else "")]
        for r in p["rejects_preview"]:
            lines.append(f"  reject row {r['source_row']}: {r['reason']} ({r['detail']})")
        return lines

    _emit(payload, as_json, human)


@iot.command("summary")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def iot_summary(ctx, as_json):
    """Device rollup over everything ingested so far."""
    try:
        workspace = open_workspace(ctx.obj["root"])
        payload = pipeline.summary_payload_for(workspace)
    except OcelBridgeError as exc:
        _fail(exc, as_json)

    def human(p):
        lines = [f"{p['reading_count']} readings across {len(p['devices'])} devices"]
        for d in p["devices"]:
            lines.append(f"  {d['device_id']} [{d['device_type']}/{d['device_kind']}] "
                         f"{d['reading_count']} readings")
            for prop in d["properties"]:
                unit = f" {prop['unit']}" if prop["unit"] else ""
                lines.append(f"    {prop['name']}{unit}: {prop['reading_count']} "
                             f"({prop['value_kind']})")
        lines.extend(f"conflict: {c}" for c in p["conflicts"])
        lines.extend(f"note: {n}" for n in p["notes"])
        return lines

    _emit(payload, as_json, human)


# ---------------------------------------------------------------- ocel


@cli.group()
def ocel():
    """OCEL store exploration."""


@ocel.command("attach")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def ocel_attach(ctx, file, as_json):
    """Adopt an OCEL 2.0 store file as the workspace's working store."""
    try:
        workspace = open_workspace(ctx.obj["root"])
        payload = pipeline.attach_ocel(workspace, Path(file).read_bytes(),
                                       Path(file).name)
    except OcelBridgeError as exc:
        _fail(exc, as_json)
    _emit(payload, as_json,
          lambda p: [f"attached store {p['sha256'][:12]}... as {p['store']}"])


@ocel.command("stats")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def ocel_stats(ctx, as_json):
    """Headline counts of the working store."""
    try:
        workspace = open_workspace(ctx.obj["root"])
        payload = stats_payload(log_statistics(pipeline.current_log(workspace)))
    except OcelBridgeError as exc:
        _fail(exc, as_json)

    def human(p):
        lines = [
            f"events: {p['event_count']}  objects: {p['object_count']}",
            f"activities: {p['activity_count']}  object types: {p['object_type_count']}",
            f"e2o: {p['e2o_count']}  o2o: {p['o2o_count']}",
        ]
        for a, n in p["per_activity_counts"].items():
            lines.append(f"  activity {a}: {n}")
        for t, n in p["per_object_type_counts"].items():
            lines.append(f"  object type {t}: {n}")
        return lines

    _emit(payload, as_json, human)


@ocel.command("dfg")
@click.option("--object-type", "object_type", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def ocel_dfg(ctx, object_type, as_json):
    """Directly-follows edges for one object type."""
    try:
        workspace = open_workspace(ctx.obj["root"])
        log = pipeline.current_log(workspace)
        payload = dfg_payload(object_type, directly_follows(log, object_type))
    except OcelBridgeError as exc:
        _fail(exc, as_json)
    _emit(payload, as_json, lambda p: [
        f"{e['source']} -> {e['target']}  [{e['count']}]" for e in p["edges"]
    ] or ["(no edges)"])


@ocel.command("validate")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def ocel_validate(ctx, as_json):
    """Run structural checks on the working store."""
    from .ocel.validate import validate_ocel

    try:
        workspace = open_workspace(ctx.obj["root"])
        violations = validate_ocel(pipeline.current_log(workspace))
        payload = {"violations": [
            {"kind": v.kind, "subject": v.subject, "message": v.message}
            for v in violations]}
    except OcelBridgeError as exc:
        _fail(exc, as_json)
    _emit(payload, as_json, lambda p: [
        f"{v['kind']}: {v['message']}" for v in p["violations"]
    ] or ["store is sound"])
    if payload["violations"]:
        sys.exit(EXIT_CODES["integrity"])


# ---------------------------------------------------------------- integrate


@cli.group()
def integrate():
    """Plan and run IoT-data integrations."""


@integrate.command("plan")
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def integrate_plan(ctx, spec_path, as_json):
    """Dry-run an integration spec; prints the plan id and a preview."""
    try:
        workspace = open_workspace(ctx.obj["root"])
        payload = pipeline.plan_integration(workspace, _load_json_file(spec_path))
    except OcelBridgeError as exc:
        _fail(exc, as_json)

    def human(p):
        matched = sum(1 for _, n in p["match_groups"] if n)
        lines = [
            f"plan {p['plan_id']}",
            f"targets matched: {matched}/{len(p['match_groups'])}  "
            f"unmatched readings: {p['unmatched_reading_count']}",
        ]
        for tid, value in p["preview_values"][:10]:
            lines.append(f"  {tid}: {value}")
        lines.extend(f"warning: {w}" for w in p["warnings"])
        return lines

    _emit(payload, as_json, human)


@integrate.command("run")
@click.option("--plan", "plan_id", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def integrate_run(ctx, plan_id, as_json):
    """Execute a previously created plan against the working store."""
    try:
        workspace = open_workspace(ctx.obj["root"])
        payload = pipeline.run_integration(workspace, plan_id)
    except OcelBridgeError as exc:
        _fail(exc, as_json)

    def human(p):
        r = p["report"]
        lines = [
            f"applied plan {p['plan_id']}: +{r['columns_added']} columns, "
            f"{r['attribute_writes']} writes, +{r['objects_added']} objects, "
            f"+{r['e2o_added']} e2o, +{r['o2o_added']} o2o",
            f"store: {p['store']} ({p['store_sha256'][:12]}...)",
        ]
        lines.extend(f"warning: {w}" for w in r["warnings"])
        return lines

    _emit(payload, as_json, human)


# ---------------------------------------------------------------- scenario


@cli.group()
def scenario():
    """Synthetic port cargo-pickup scenario."""


@scenario.command("generate")
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="scenario")
@click.option("--trucks", type=int, default=8, show_default=True)
@click.option("--plans", type=int, default=3, show_default=True)
@click.option("--anomaly-rate", type=float, default=0.25, show_default=True)
@click.option("--corruptions", type=int, default=5, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def scenario_generate(seed, out_dir, trucks, plans, anomaly_rate, corruptions, as_json):
    """Generate the scenario store, sensor tables, and ground truth."""
    from .scenario.generate import ScenarioParams, generate

    try:
        params = ScenarioParams(
            seed=seed, truck_count=trucks, plan_count=plans,
            anomaly_rate=anomaly_rate, corruption_count=corruptions)
        artifacts = generate(params, out_dir)
    except OcelBridgeError as exc:
        _fail(exc, as_json)
    payload = {
        "store": str(artifacts.store_path),
        "gps": str(artifacts.gps_path),
        "weights": str(artifacts.weight_path),
        "ground_truth": str(artifacts.truth_path),
    }
    _emit(payload, as_json, lambda p: [f"{k}: {v}" for k, v in p.items()])


# ---------------------------------------------------------------- serve


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--static", "static_dir", type=click.Path(file_okay=False),
              default=None, help="Directory of built UI assets to serve at /.")
@click.pass_context
def serve(ctx, host, port, static_dir):
    """Run the HTTP API (and optionally the UI) for this workspace."""
    import uvicorn

    from .api.app import create_app

    init_workspace(ctx.obj["root"])
    app = create_app(ctx.obj["root"], static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


def main():
    cli(prog_name="ocelbridge")


if __name__ == "__main__":
    main()
