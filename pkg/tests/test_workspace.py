from __future__ import annotations

import hashlib
import threading

import pytest

from ocelbridge.errors import HashMismatch, IoError, NotFound, UploadError
from ocelbridge.workspace import (
    Workspace,
    find_done_job,
    init_workspace,
    load_ledger,
    new_job,
    open_workspace,
    read_upload,
    stage_upload,
    update_job,
    upload_path,
)


@pytest.fixture
def ws(tmp_path):
    return init_workspace(tmp_path / "ws")


def test_init_creates_layout(ws):
    assert ws.uploads.is_dir()
    assert ws.adjusted.is_dir()
    assert ws.processed.is_dir()


def test_init_is_idempotent(tmp_path):
    a = init_workspace(tmp_path / "ws")
    (a.uploads / "keep").write_bytes(b"x")
    b = init_workspace(tmp_path / "ws")
    assert (b.uploads / "keep").exists()
    assert isinstance(b, Workspace)


def test_open_requires_initialized_root(tmp_path):
    with pytest.raises(NotFound):
        open_workspace(tmp_path / "missing")
    init_workspace(tmp_path / "missing")
    open_workspace(tmp_path / "missing")


def test_stage_upload_names_by_hash(ws):
    data = b"col\n1\n"
    path, sha = stage_upload(ws, data, "readings.csv")
    assert sha == hashlib.sha256(data).hexdigest()
    assert path.name == f"{sha}.csv"
    assert path.read_bytes() == data


def test_stage_upload_dedupes_content(ws):
    p1, h1 = stage_upload(ws, b"same", "a.csv")
    p2, h2 = stage_upload(ws, b"same", "b.csv")
    assert h1 == h2
    assert p1 == p2
    assert len(list(ws.uploads.iterdir())) == 1


def test_stage_upload_sanitizes_suffix(ws):
    path, _ = stage_upload(ws, b"data", "../../etc/passwd ; rm -rf")
    assert path.parent == ws.uploads
    assert "/" not in path.name and " " not in path.name


def test_stage_upload_rejects_empty(ws):
    with pytest.raises(UploadError):
        stage_upload(ws, b"", "x.csv")


def test_read_upload_round_trip_and_missing(ws):
    _, sha = stage_upload(ws, b"payload", "p.bin")
    assert read_upload(ws, sha) == b"payload"
    with pytest.raises(NotFound):
        read_upload(ws, "0" * 64)
    with pytest.raises(NotFound):
        upload_path(ws, "0" * 64)


def test_read_upload_detects_tampering(ws):
    path, sha = stage_upload(ws, b"honest", "h.bin")
    path.write_bytes(b"evil")
    with pytest.raises(HashMismatch):
        read_upload(ws, sha)


# ----------------------------------------------------------------------
# job ledger
# ----------------------------------------------------------------------


def test_job_lifecycle(ws):
    job = new_job(ws, "normalize", ["abc"], extra={"name": "w.csv"})
    assert job.status == "pending"
    running = update_job(ws, job, "running")
    done = update_job(ws, running, "done", output_paths=["adjusted/x.parquet"])
    assert done.output_paths == ("adjusted/x.parquet",)

    ledger = load_ledger(ws)
    assert [j.job_id for j in ledger] == [job.job_id]
    assert ledger[0].status == "done"
    assert ledger[0].extra["name"] == "w.csv"


def test_illegal_transitions_rejected(ws):
    job = new_job(ws, "explore", [])
    with pytest.raises(IoError):
        update_job(ws, job, "done")  # must pass through running
    running = update_job(ws, job, "running")
    done = update_job(ws, running, "done")
    with pytest.raises(IoError):
        update_job(ws, done, "running")


def test_unknown_job_kind_rejected(ws):
    with pytest.raises(IoError):
        new_job(ws, "transmogrify", [])


def test_ledger_orders_by_first_appearance(ws):
    first = new_job(ws, "normalize", ["x"])
    second = new_job(ws, "integrate", ["y"])
    update_job(ws, update_job(ws, first, "running"), "done")
    ledger = load_ledger(ws)
    assert [j.job_id for j in ledger] == [first.job_id, second.job_id]


def test_find_done_job_replays_latest_match(ws):
    miss = find_done_job(ws, "normalize", ["abc", "def"])
    assert miss is None

    j1 = new_job(ws, "normalize", ["abc", "def"])
    update_job(ws, update_job(ws, j1, "running"), "done", output_paths=["one"])
    j2 = new_job(ws, "normalize", ["abc", "def"])
    update_job(ws, update_job(ws, j2, "running"), "done", output_paths=["two"])
    failed = new_job(ws, "normalize", ["abc", "zzz"])
    update_job(ws, update_job(ws, failed, "running"), "failed")

    hit = find_done_job(ws, "normalize", ["abc", "def"])
    assert hit is not None
    assert hit.output_paths == ("two",)
    assert find_done_job(ws, "normalize", ["abc", "zzz"]) is None
    assert find_done_job(ws, "integrate", ["abc", "def"]) is None


def test_failed_job_records_reason(ws):
    job = new_job(ws, "ingest", ["h"])
    running = update_job(ws, job, "running")
    update_job(ws, running, "failed", extra={"error": "boom"})
    assert load_ledger(ws)[0].extra["error"] == "boom"


def test_concurrent_appends_keep_all_records(ws):
    def work(i):
        job = new_job(ws, "normalize", [f"h{i}"])
        update_job(ws, update_job(ws, job, "running"), "done")

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=20)
    ledger = load_ledger(ws)
    assert len(ledger) == 8
    assert all(j.status == "done" for j in ledger)


def test_job_record_dict_round_trip(ws):
    from ocelbridge.workspace import JobRecord

    job = new_job(ws, "explore", ["a"], extra={"k": "v"})
    assert JobRecord.from_dict(job.to_dict()) == job
