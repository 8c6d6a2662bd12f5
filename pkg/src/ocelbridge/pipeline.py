"""Workspace-level orchestration tying storage, normalization, and the
integration engine together. Both frontends (CLI and API) call only into
this module, which is what makes their outputs identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import MappingError, NotFound
from .integrate.engine import execute as engine_execute
from .integrate.engine import plan as engine_plan
from .integrate.spec import parse_spec
from .iotschema.mapping import ColumnMapping, infer_mapping
from .iotschema.model import (
    READING_COLUMNS,
    Reject,
    Table,
    reading_from_row,
    reading_to_row,
)
from .iotschema.normalize import mapping_notes, normalize
from .iotschema.summary import device_summary
from .ocel.model import OcelLog
from .ocel.storage import apply_additions, load_ocel
from .payloads import (
    mapping_payload,
    plan_from_payload,
    plan_payload,
    reject_payload,
    report_payload,
    summary_payload,
)
from .workspace.columnar import read_columnar, store_columnar
from .workspace.workspace import (
    Workspace,
    find_done_job,
    new_job,
    read_upload,
    stage_upload,
    update_job,
    upload_path,
)

STORE_NAME = "store.sqlite"
PREVIEW_LIMIT = 25
REJECT_PREVIEW_LIMIT = 20

READING_SCHEMA = {
    "device_id": "string",
    "device_type": "string",
    "device_kind": "string",
    "property": "string",
    "unit": "string",
    "value_numeric": "float64",
    "value_text": "string",
    "result_time_utc_ms": "int64",
    "location": "string",
    "object_ref": "string",
    "event_ref": "string",
    "source_row": "int64",
}
REJECT_SCHEMA = {"source_row": "int64", "reason": "string", "detail": "string"}

assert tuple(READING_SCHEMA) == READING_COLUMNS


def _rel(ws: Workspace, path: Path) -> str:
    return path.relative_to(ws.root).as_posix()


def store_path(ws: Workspace) -> Path:
    return ws.processed / STORE_NAME


def current_log(ws: Workspace) -> OcelLog:
    path = store_path(ws)
    if not path.is_file():
        raise NotFound("no OCEL store attached to this workspace")
    return load_ocel(path)


def attach_ocel(ws: Workspace, data: bytes, name: str = "store.sqlite") -> dict:
    """Stage an OCEL store upload and make it the workspace's working store."""
    staged, sha = stage_upload(ws, data, name)
    job = new_job(ws, "explore", (sha,), extra={"artifact": "ocel-store", "name": name})
    job = update_job(ws, job, "running")
    try:
        load_ocel(staged)  # validates before adoption
        target = store_path(ws)
        target.write_bytes(data)
    except Exception as exc:
        update_job(ws, job, "failed", extra={"error": str(exc)})
        raise
    update_job(ws, job, "done", output_paths=(_rel(ws, target),))
    return {"store": _rel(ws, target), "sha256": sha, "job_id": job.job_id}


@dataclass(frozen=True)
class IngestResult:
    upload_sha256: str
    readings: list
    rejects: list
    readings_path: str
    rejects_path: str
    notes: list
    replayed: bool
    job_id: str


def _mapping_hash(mapping: ColumnMapping) -> str:
    feed = json.dumps(mapping.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(feed.encode("utf-8")).hexdigest()


def infer_for_upload(ws: Workspace, sha256: str) -> dict:
    data = read_upload(ws, sha256)
    table = Table.from_csv_text(data.decode("utf-8"))
    return mapping_payload(infer_mapping(table))


def ingest_readings(ws: Workspace, data: bytes, name: str,
                    mapping: ColumnMapping | None) -> IngestResult:
    """Normalize one uploaded table into the adjusted columnar stage.

    Re-running with identical content and mapping replays the prior job's
    outputs instead of recomputing.
    """
    staged, sha = stage_upload(ws, data, name)
    table = Table.from_csv_text(data.decode("utf-8"))
    if mapping is None:
        suggestion = infer_mapping(table)
        if suggestion.unresolved:
            raise MappingError(
                "cannot infer required roles "
                f"{list(suggestion.unresolved)}; provide a mapping")
        mapping = suggestion.mapping
    inputs = (sha, _mapping_hash(mapping))

    prior = find_done_job(ws, "normalize", inputs)
    if prior is not None:
        readings = _read_readings_file(ws.root / prior.output_paths[0])
        rejects = _read_rejects_file(ws.root / prior.output_paths[1])
        return IngestResult(
            upload_sha256=sha, readings=readings, rejects=rejects,
            readings_path=prior.output_paths[0], rejects_path=prior.output_paths[1],
            notes=list(prior.extra.get("notes", [])), replayed=True,
            job_id=prior.job_id)

    job = new_job(ws, "normalize", inputs, extra={"name": name})
    job = update_job(ws, job, "running")
    try:
        readings, rejects = normalize(table, mapping)
        notes = mapping_notes(mapping)
        stem = sha[:16]
        readings_path = store_columnar(
            ws, "adjusted", f"{stem}.readings",
            [reading_to_row(r) for r in readings], schema=READING_SCHEMA)
        rejects_path = store_columnar(
            ws, "adjusted", f"{stem}.rejects",
            [reject_payload(r) for r in rejects], schema=REJECT_SCHEMA)
    except Exception as exc:
        update_job(ws, job, "failed", extra={"error": str(exc)})
        raise
    outputs = (_rel(ws, readings_path), _rel(ws, rejects_path))
    update_job(ws, job, "done", output_paths=outputs,
               extra={"notes": notes, "readings": len(readings),
                      "rejects": len(rejects)})
    return IngestResult(
        upload_sha256=sha, readings=readings, rejects=rejects,
        readings_path=outputs[0], rejects_path=outputs[1],
        notes=notes, replayed=False, job_id=job.job_id)


def _read_readings_file(path: Path) -> list:
    _, rows = read_columnar(path)
    return [reading_from_row(row) for row in rows]


def _read_rejects_file(path: Path) -> list:
    _, rows = read_columnar(path)
    return [Reject(source_row=row["source_row"], reason=row["reason"],
                   detail=row["detail"]) for row in rows]


def load_all_readings(ws: Workspace) -> list:
    """Union of every ingested readings file, in stable (file name) order."""
    readings: list = []
    for path in sorted(ws.adjusted.glob("*.readings.parquet")):
        readings.extend(_read_readings_file(path))
    return readings


def workspace_notes(ws: Workspace) -> list:
    from .workspace.workspace import load_ledger

    notes: list = []
    for record in load_ledger(ws):
        if record.kind == "normalize" and record.status == "done":
            for note in record.extra.get("notes", []):
                if note not in notes:
                    notes.append(note)
    return notes


def summary_payload_for(ws: Workspace) -> dict:
    readings = load_all_readings(ws)
    return summary_payload(device_summary(readings, notes=workspace_notes(ws)))


def ingest_payload(result: IngestResult) -> dict:
    summary = device_summary(result.readings, notes=result.notes)
    return {
        "upload_sha256": result.upload_sha256,
        "readings": len(result.readings),
        "rejects": len(result.rejects),
        "replayed": result.replayed,
        "job_id": result.job_id,
        "readings_path": result.readings_path,
        "rejects_path": result.rejects_path,
        "rejects_preview": [reject_payload(r)
                            for r in result.rejects[:REJECT_PREVIEW_LIMIT]],
        "summary": summary_payload(summary),
    }


# ----------------------------------------------------------------------
# integration
# ----------------------------------------------------------------------


def _plans_dir(ws: Workspace) -> Path:
    path = ws.processed / "plans"
    path.mkdir(parents=True, exist_ok=True)
    return path


def plan_integration(ws: Workspace, spec_data: dict) -> dict:
    spec = parse_spec(spec_data)
    log = current_log(ws)
    readings = load_all_readings(ws)
    pln = engine_plan(spec, log, readings, preview_limit=PREVIEW_LIMIT)
    feed = json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":")) \
        + pln.log_fingerprint + pln.readings_fingerprint
    plan_id = hashlib.sha256(feed.encode("utf-8")).hexdigest()[:16]
    payload = plan_payload(plan_id, pln)
    path = _plans_dir(ws) / f"{plan_id}.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return payload


def get_plan(ws: Workspace, plan_id: str) -> dict:
    path = _plans_dir(ws) / f"{plan_id}.json"
    if not path.is_file():
        raise NotFound(f"no plan with id {plan_id}")
    return json.loads(path.read_text(encoding="utf-8"))


def run_integration(ws: Workspace, plan_id: str) -> dict:
    payload = get_plan(ws, plan_id)
    _, pln = plan_from_payload(payload)
    log = current_log(ws)
    readings = load_all_readings(ws)

    job = new_job(ws, "integrate",
                  (plan_id, pln.log_fingerprint, pln.readings_fingerprint),
                  extra={"plan_id": plan_id})
    job = update_job(ws, job, "running")
    try:
        additions, report = engine_execute(pln, log, readings)
        apply_additions(store_path(ws), additions)
    except Exception as exc:
        update_job(ws, job, "failed", extra={"error": str(exc)})
        raise
    store_rel = _rel(ws, store_path(ws))
    update_job(ws, job, "done", output_paths=(store_rel,))
    sha = hashlib.sha256(store_path(ws).read_bytes()).hexdigest()
    return {
        "plan_id": plan_id,
        "report": report_payload(report),
        "store": store_rel,
        "store_sha256": sha,
        "job_id": job.job_id,
    }


def staged_upload_path(ws: Workspace, sha256: str) -> Path:
    return upload_path(ws, sha256)
