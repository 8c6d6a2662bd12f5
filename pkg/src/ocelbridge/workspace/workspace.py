"""Directory-backed workspace: staged artifacts plus an append-only job ledger.

Layout under the root:
  uploads/    raw input files, named by content hash (dedup by construction)
  adjusted/   normalized intermediates (columnar)
  processed/  the working OCEL store, plans, final outputs
  ledger.jsonl  one JSON line per job state change; later lines supersede
"""

from __future__ import annotations

import hashlib
import json
import re
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from filelock import FileLock

from ..errors import HashMismatch, IoError, NotFound, UploadError
from ..timeutil import format_timestamp

JOB_KINDS = ("ingest", "normalize", "explore", "integrate")
_TRANSITIONS = {"pending": ("running",), "running": ("done", "failed")}


@dataclass(frozen=True)
class Workspace:
    root: Path

    @property
    def uploads(self) -> Path:
        return self.root / "uploads"

    @property
    def adjusted(self) -> Path:
        return self.root / "adjusted"

    @property
    def processed(self) -> Path:
        return self.root / "processed"

    @property
    def ledger_path(self) -> Path:
        return self.root / "ledger.jsonl"


@dataclass(frozen=True)
class JobRecord:
    job_id: str
    kind: str
    input_hashes: tuple
    output_paths: tuple = ()
    status: str = "pending"
    created_at: str = ""
    updated_at: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "input_hashes": list(self.input_hashes),
            "output_paths": list(self.output_paths),
            "status": self.status,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "extra": dict(self.extra),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "JobRecord":
        return cls(
            job_id=data["job_id"],
            kind=data["kind"],
            input_hashes=tuple(data.get("input_hashes", ())),
            output_paths=tuple(data.get("output_paths", ())),
            status=data.get("status", "pending"),
            created_at=data.get("created_at", ""),
            updated_at=data.get("updated_at", ""),
            extra=dict(data.get("extra", {})),
        )


def _now() -> str:
    return format_timestamp(datetime.now(timezone.utc))


def init_workspace(root) -> Workspace:
    """Create the directory layout; calling it on an existing root is a no-op."""
    ws = Workspace(root=Path(root))
    try:
        for sub in (ws.root, ws.uploads, ws.adjusted, ws.processed):
            sub.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create workspace at {root}: {exc}") from exc
    return ws


def open_workspace(root) -> Workspace:
    ws = Workspace(root=Path(root))
    if not ws.uploads.is_dir() or not ws.processed.is_dir():
        raise NotFound(f"no workspace at {root}; run init first")
    return ws


def stage_upload(ws: Workspace, data: bytes, name: str = "upload") -> tuple:
    """Store bytes under uploads/, named by SHA-256. Returns (path, sha256).

    Identical content maps to the same file, so duplicates cost nothing.
    """
    if not data:
        raise UploadError("refusing zero-byte upload")
    sha = hashlib.sha256(data).hexdigest()
    suffix = "".join(Path(name).suffixes)
    suffix = re.sub(r"[^A-Za-z0-9.]", "", suffix)[:16]
    path = ws.uploads / f"{sha}{suffix}"
    if not path.exists():
        # other staged copies of the same content may differ only in suffix
        twins = list(ws.uploads.glob(f"{sha}*"))
        if twins:
            return twins[0], sha
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_bytes(data)
        tmp.replace(path)
    return path, sha


def upload_path(ws: Workspace, sha256: str) -> Path:
    matches = sorted(ws.uploads.glob(f"{sha256}*"))
    matches = [m for m in matches if not m.name.endswith(".tmp")]
    if not matches:
        raise NotFound(f"no staged upload with hash {sha256}")
    return matches[0]


def read_upload(ws: Workspace, sha256: str) -> bytes:
    """Read a staged upload back, re-verifying its content hash."""
    path = upload_path(ws, sha256)
    data = path.read_bytes()
    actual = hashlib.sha256(data).hexdigest()
    if actual != sha256:
        raise HashMismatch(
            f"staged file {path.name} hashes to {actual[:12]}..., "
            f"expected {sha256[:12]}...")
    return data


# ----------------------------------------------------------------------
# ledger
# ----------------------------------------------------------------------


def append_job(ws: Workspace, record: JobRecord) -> None:
    line = json.dumps(record.to_dict(), sort_keys=True, separators=(",", ":"))
    lock = FileLock(str(ws.ledger_path) + ".lock")
    with lock:
        with ws.ledger_path.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")


def new_job(ws: Workspace, kind: str, input_hashes, extra: dict | None = None) -> JobRecord:
    if kind not in JOB_KINDS:
        raise IoError(f"unknown job kind: {kind!r}")
    now = _now()
    record = JobRecord(
        job_id=uuid.uuid4().hex[:12], kind=kind,
        input_hashes=tuple(input_hashes), status="pending",
        created_at=now, updated_at=now, extra=dict(extra or {}))
    append_job(ws, record)
    return record


def update_job(ws: Workspace, record: JobRecord, status: str,
               output_paths=None, extra: dict | None = None) -> JobRecord:
    if status not in _TRANSITIONS.get(record.status, ()):
        raise IoError(
            f"illegal job transition {record.status} -> {status} for {record.job_id}")
    updated = replace(
        record,
        status=status,
        output_paths=tuple(output_paths) if output_paths is not None else record.output_paths,
        extra={**record.extra, **(extra or {})},
        updated_at=_now())
    append_job(ws, updated)
    return updated


def load_ledger(ws: Workspace) -> list:
    """Latest state per job, in order of first appearance."""
    if not ws.ledger_path.exists():
        return []
    latest: dict = {}
    order: list = []
    with ws.ledger_path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = JobRecord.from_dict(json.loads(line))
            if record.job_id not in latest:
                order.append(record.job_id)
            latest[record.job_id] = record
    return [latest[job_id] for job_id in order]


def find_done_job(ws: Workspace, kind: str, input_hashes) -> JobRecord | None:
    """Replay hook: most recent done job with the same kind and inputs."""
    wanted = tuple(input_hashes)
    found = None
    for record in load_ledger(ws):
        if record.kind == kind and record.status == "done" \
                and record.input_hashes == wanted:
            found = record
    return found
