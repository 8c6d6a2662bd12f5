from __future__ import annotations

import random
import sqlite3
import threading
import time

import pytest

from ocelbridge.errors import (
    IntegrityError,
    IoError,
    LeaseHeld,
    MigrationConflict,
    SchemaError,
)
from ocelbridge.ocel import (
    AdditionSet,
    OcelObject,
    ObjectAttributeEntry,
    apply_additions,
    load_ocel,
    table_snapshot,
    write_ocel,
)
from ocelbridge.ocel import storage
from ocelbridge.ocel.model import E2ORelation, O2ORelation

from .conftest import at, make_log, random_small_log
from .oracles import additive_violations, oracle_snapshot


def sample_additions():
    """Exercises every kind of addition at once."""
    return AdditionSet(
        new_event_attribute_columns=[("Pack Item", "net_weight", "float")],
        new_object_attribute_columns=[
            ("Order", "avg_temp", "float"),
            ("Sensor", "model", "string"),
        ],
        event_attribute_writes=[("e2", "net_weight", 12.5)],
        object_attribute_rows=[
            ("o1", "avg_temp", 4.5, at(300)),
            ("s1", "model", "TH-200", at(0)),
        ],
        new_objects=[OcelObject("s1", "Sensor", ())],
        new_e2o=[E2ORelation("e2", "s1", "derived-from")],
        new_o2o=[O2ORelation("s1", "o1", "observed")],
        new_object_types=["Sensor"],
    )


# ----------------------------------------------------------------------
# helpers round-trip
# ----------------------------------------------------------------------


def test_quote_ident_escapes_quotes():
    assert storage.quote_ident('we"ird') == '"we""ird"'


@pytest.mark.parametrize("decl,vtype", [
    ("TEXT", "string"),
    ("VARCHAR(30)", "string"),
    ("REAL", "float"),
    ("DOUBLE", "float"),
    ("INTEGER", "integer"),
    ("BOOLEAN", "boolean"),
    ("TIMESTAMP", "timestamp"),
    ("DATETIME", "timestamp"),
    ("", "string"),
])
def test_decl_to_vtype_affinities(decl, vtype):
    assert storage.decl_to_vtype(decl) == vtype


def test_make_mapped_name_sanitizes_and_disambiguates():
    taken = set()
    first = storage.make_mapped_name("Pick-up Plan!", taken)
    taken.add(first)
    second = storage.make_mapped_name("Pick up Plan", taken)
    assert first != second
    assert all(c.isalnum() for c in first)


# ----------------------------------------------------------------------
# write + load
# ----------------------------------------------------------------------


def test_round_trip_preserves_fingerprint(tmp_path, tiny_log):
    path = write_ocel(tiny_log, tmp_path / "s.sqlite")
    loaded = load_ocel(path)
    assert loaded.fingerprint() == tiny_log.fingerprint()
    assert loaded.event_attr_types == tiny_log.event_attr_types
    assert loaded.object_attr_types == tiny_log.object_attr_types


def test_round_trip_random_logs(tmp_path):
    rng = random.Random(7)
    for i in range(10):
        log = random_small_log(rng)
        path = write_ocel(log, tmp_path / f"log{i}.sqlite")
        assert load_ocel(path).fingerprint() == log.fingerprint()


def test_loaded_events_sorted_by_time_then_id(tmp_path):
    rng = random.Random(11)
    path = write_ocel(random_small_log(rng), tmp_path / "s.sqlite")
    events = load_ocel(path).events
    keys = [(e.time, e.id) for e in events]
    assert keys == sorted(keys)


def test_write_refuses_overwrite(tmp_path, tiny_log):
    path = write_ocel(tiny_log, tmp_path / "s.sqlite")
    with pytest.raises(IoError):
        write_ocel(tiny_log, path)
    write_ocel(tiny_log, path, overwrite=True)


def test_load_missing_file(tmp_path):
    with pytest.raises(IoError):
        load_ocel(tmp_path / "nope.sqlite")


def test_load_not_a_database(tmp_path):
    path = tmp_path / "junk.sqlite"
    path.write_text("definitely not sqlite")
    with pytest.raises(SchemaError):
        load_ocel(path)


def test_load_missing_mandatory_table(tmp_path, tiny_store):
    conn = sqlite3.connect(tiny_store)
    conn.execute("DROP TABLE event_object")
    conn.commit()
    conn.close()
    with pytest.raises(SchemaError) as exc:
        load_ocel(tiny_store)
    assert "event_object" in str(exc.value)


def test_load_dangling_relation(tmp_path, tiny_store):
    conn = sqlite3.connect(tiny_store)
    conn.execute(
        "INSERT INTO event_object (ocel_event_id, ocel_object_id, ocel_qualifier) "
        "VALUES ('e1', 'ghost', 'q')")
    conn.commit()
    conn.close()
    with pytest.raises(IntegrityError):
        load_ocel(tiny_store)


def test_load_preserves_extra_tables(tmp_path, tiny_log):
    path = write_ocel(tiny_log, tmp_path / "s.sqlite")
    conn = sqlite3.connect(path)
    conn.execute("CREATE TABLE custom_notes (k TEXT, v INTEGER)")
    conn.execute("INSERT INTO custom_notes VALUES ('a', 1)")
    conn.commit()
    conn.close()
    log = load_ocel(path)
    assert "custom_notes" in log.extra_tables
    out = write_ocel(log, path.with_name("copy.sqlite"))
    snap = oracle_snapshot(out)
    assert snap["custom_notes"][1] == oracle_snapshot(path)["custom_notes"][1]


def test_table_snapshot_matches_oracle(tiny_store):
    ours = table_snapshot(tiny_store)
    theirs = oracle_snapshot(tiny_store)
    assert set(ours) == set(theirs)
    for table in ours:
        assert tuple(ours[table][0]) == tuple(theirs[table][0])
        assert ours[table][1] == theirs[table][1]


# ----------------------------------------------------------------------
# apply_additions
# ----------------------------------------------------------------------


def test_apply_full_addition_set(tiny_store):
    before = oracle_snapshot(tiny_store)
    receipt = apply_additions(tiny_store, sample_additions())
    after = oracle_snapshot(tiny_store)

    assert additive_violations(before, after) == []
    assert receipt.columns_added == 3
    assert receipt.attribute_writes == 3
    assert receipt.objects_added == 1
    assert receipt.e2o_added == 1
    assert receipt.o2o_added == 1
    assert receipt.object_types_added == 1

    log = load_ocel(tiny_store)
    assert log.events_by_id["e2"].attributes["net_weight"] == 12.5
    assert "Sensor" in log.object_types
    entries = {(en.name, en.value) for en in log.objects_by_id["o1"].attribute_history}
    assert ("avg_temp", 4.5) in entries
    assert any(r.object_id == "s1" for r in log.e2o_by_event["e2"])


def test_apply_empty_set_is_noop(tiny_store):
    before = oracle_snapshot(tiny_store)
    receipt = apply_additions(tiny_store, AdditionSet())
    assert receipt == type(receipt)()
    assert oracle_snapshot(tiny_store) == before


def test_apply_missing_store(tmp_path):
    with pytest.raises(IoError):
        apply_additions(tmp_path / "nope.sqlite", AdditionSet())


@pytest.mark.parametrize("mutate,exc", [
    # same column name on an existing activity
    (lambda a: a.new_event_attribute_columns.append(("Create Order", "clerk", "string")),
     MigrationConflict),
    # duplicate declaration inside one set
    (lambda a: a.new_event_attribute_columns.append(("Pack Item", "net_weight", "float")),
     MigrationConflict),
    # object type already in the store
    (lambda a: a.new_object_types.append("Order"), MigrationConflict),
    # unknown activity
    (lambda a: a.new_event_attribute_columns.append(("Ghost", "x", "float")),
     IntegrityError),
    # write to a column the set does not introduce
    (lambda a: a.event_attribute_writes.append(("e1", "clerk", "zoe")), IntegrityError),
    # write to an absent event
    (lambda a: a.event_attribute_writes.append(("e99", "net_weight", 1.0)),
     IntegrityError),
    # wrong value type for the declared column
    (lambda a: a.event_attribute_writes.append(("e1", "net_weight", "heavy")),
     IntegrityError),
    # duplicate write to the same cell
    (lambda a: a.event_attribute_writes.append(("e2", "net_weight", 13.0)),
     IntegrityError),
    # new object colliding with an existing id
    (lambda a: a.new_objects.append(OcelObject("o1", "Sensor", ())), IntegrityError),
    # new object of an undeclared type
    (lambda a: a.new_objects.append(OcelObject("s2", "Unheard", ())), IntegrityError),
    # attribute row for an absent object
    (lambda a: a.object_attribute_rows.append(("ghost", "avg_temp", 1.0, at(0))),
     IntegrityError),
    # attribute row without a timestamp
    (lambda a: a.object_attribute_rows.append(("o1", "avg_temp", 1.0, None)),
     IntegrityError),
    # dangling e2o
    (lambda a: a.new_e2o.append(E2ORelation("e99", "s1", "q")), IntegrityError),
    # dangling o2o
    (lambda a: a.new_o2o.append(O2ORelation("s1", "ghost", "q")), IntegrityError),
    # unknown value type
    (lambda a: a.new_event_attribute_columns.append(("Pack Item", "y", "decimal")),
     IntegrityError),
])
def test_apply_rejects_bad_sets_untouched(tiny_store, mutate, exc):
    additions = sample_additions()
    mutate(additions)
    before = oracle_snapshot(tiny_store)
    with pytest.raises(exc):
        apply_additions(tiny_store, additions)
    assert oracle_snapshot(tiny_store) == before


def test_apply_is_atomic_under_faults(tiny_store, monkeypatch):
    """Kill the writer at every statement boundary; the store never changes."""
    real_exec = storage._exec
    before = oracle_snapshot(tiny_store)

    total_calls = 0

    def counting(conn, sql, params=()):
        nonlocal total_calls
        total_calls += 1
        return real_exec(conn, sql, params)

    monkeypatch.setattr(storage, "_exec", counting)
    apply_additions(tiny_store, sample_additions())
    assert total_calls > 5

    for fail_at in range(1, total_calls + 1):
        fresh = tiny_store.with_name(f"fault{fail_at}.sqlite")
        write_ocel(make_log(), fresh)
        assert oracle_snapshot(fresh) == before

        calls = 0

        def bomb(conn, sql, params=(), _n=fail_at):
            nonlocal calls
            calls += 1
            if calls == _n:
                raise sqlite3.OperationalError("injected fault")
            return real_exec(conn, sql, params)

        monkeypatch.setattr(storage, "_exec", bomb)
        with pytest.raises(sqlite3.OperationalError):
            apply_additions(fresh, sample_additions())
        assert oracle_snapshot(fresh) == before, \
            f"store changed after fault at call {fail_at}"


def test_lease_nonblocking_raises_when_held(tiny_store):
    lease = storage._lease_for(tiny_store.resolve())
    assert lease.acquire()
    try:
        with pytest.raises(LeaseHeld):
            apply_additions(tiny_store, sample_additions(), blocking=False)
    finally:
        lease.release()
    apply_additions(tiny_store, sample_additions(), blocking=False)


def test_lease_grants_in_fifo_order(tiny_store):
    lease = storage._lease_for(tiny_store.resolve())
    order = []

    def worker(tag):
        lease.acquire()
        order.append(tag)
        lease.release()

    lease.acquire()
    threads = []
    for n, tag in enumerate(("a", "b", "c"), start=1):
        t = threading.Thread(target=worker, args=(tag,))
        t.start()
        deadline = time.monotonic() + 5
        while len(lease._queue) < n:  # wait for the thread to enqueue
            assert time.monotonic() < deadline
            time.sleep(0.001)
        threads.append(t)
    lease.release()
    for t in threads:
        t.join(timeout=5)
    assert order == ["a", "b", "c"]


def test_concurrent_appliers_all_land(tiny_store):
    errors = []

    def worker(i):
        additions = AdditionSet(
            new_event_attribute_columns=[("Pack Item", f"m{i}", "float")],
            event_attribute_writes=[("e2", f"m{i}", float(i))],
        )
        try:
            apply_additions(tiny_store, additions)
        except Exception as exc:  # noqa: BLE001 - surfaced below
            errors.append(exc)

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=20)
    assert errors == []
    ev = load_ocel(tiny_store).events_by_id["e2"]
    assert {f"m{i}": float(i) for i in range(6)}.items() <= ev.attributes.items()
