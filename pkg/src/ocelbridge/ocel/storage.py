"""OCEL 2.0 single-file relational store: load, write, additively extend.

Table layout follows the published OCEL 2.0 relational schema:
``event``/``object`` id tables, ``event_object``/``object_object`` relation
tables, ``event_map_type``/``object_map_type`` name mapping tables, and one
``event_<MappedType>`` / ``object_<MappedType>`` table per type holding the
typed attribute columns.

Additions are applied in a single transaction on the store file itself, so
a failing apply leaves the store bit-identical to its pre-call state.
"""

from __future__ import annotations

import sqlite3
import threading
from collections import Counter, deque
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from ..errors import IntegrityError, IoError, LeaseHeld, MigrationConflict, SchemaError
from ..timeutil import format_timestamp, parse_timestamp
from .model import (
    VALUE_TYPES,
    E2ORelation,
    ExtraTable,
    O2ORelation,
    ObjectAttributeEntry,
    OcelEvent,
    OcelLog,
    OcelObject,
)

REQUIRED_TABLES = (
    "event",
    "object",
    "event_object",
    "object_object",
    "event_map_type",
    "object_map_type",
)

_DECL_BY_VTYPE = {
    "string": "TEXT",
    "integer": "INTEGER",
    "float": "REAL",
    "boolean": "BOOLEAN",
    "timestamp": "TIMESTAMP",
}

_EVENT_RESERVED = ("ocel_id", "ocel_time")
_OBJECT_RESERVED = ("ocel_id", "ocel_time", "ocel_changed_field")


def quote_ident(name: str) -> str:
    return '"' + name.replace('"', '""') + '"'


def decl_to_vtype(decl: str) -> str:
    d = (decl or "").upper()
    if "BOOL" in d:
        return "boolean"
    if "INT" in d:
        return "integer"
    if "CHAR" in d or "CLOB" in d or "TEXT" in d:
        return "string"
    if "REAL" in d or "FLOA" in d or "DOUB" in d:
        return "float"
    if "TIME" in d or "DATE" in d:
        return "timestamp"
    return "string"


def make_mapped_name(type_name: str, taken) -> str:
    """Alphanumeric table-name fragment for a type, unique among ``taken``."""
    base = "".join(ch for ch in type_name if ch.isalnum()) or "Type"
    candidate, i = base, 2
    while candidate in taken:
        candidate = f"{base}{i}"
        i += 1
    return candidate


def _to_sql(value, vtype: str):
    if value is None:
        return None
    if vtype == "boolean":
        return 1 if value else 0
    if vtype == "timestamp":
        return format_timestamp(value)
    return value


def _from_sql(value, vtype: str):
    if value is None:
        return None
    if vtype == "boolean":
        return bool(value)
    if vtype == "timestamp":
        return parse_timestamp(value)
    if vtype == "float":
        return float(value)
    return value


def _value_matches(value, vtype: str) -> bool:
    if value is None:
        return True
    if vtype == "boolean":
        return isinstance(value, bool)
    if vtype == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if vtype == "float":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if vtype == "timestamp":
        return isinstance(value, datetime)
    return isinstance(value, str)


# ----------------------------------------------------------------------
# additions
# ----------------------------------------------------------------------


@dataclass
class AdditionSet:
    """A purely additive delta against an OCEL store.

    Never deletes or mutates existing data; the only cell updates allowed
    are fills of columns this same set introduces.
    """

    new_event_attribute_columns: list = field(default_factory=list)  # (activity, attr, vtype)
    new_object_attribute_columns: list = field(default_factory=list)  # (otype, attr, vtype)
    event_attribute_writes: list = field(default_factory=list)  # (event_id, attr, value)
    object_attribute_rows: list = field(default_factory=list)  # (object_id, attr, value, time)
    new_objects: list = field(default_factory=list)
    new_e2o: list = field(default_factory=list)
    new_o2o: list = field(default_factory=list)
    new_object_types: list = field(default_factory=list)

    def is_empty(self) -> bool:
        return not any((
            self.new_event_attribute_columns, self.new_object_attribute_columns,
            self.event_attribute_writes, self.object_attribute_rows,
            self.new_objects, self.new_e2o, self.new_o2o, self.new_object_types,
        ))


@dataclass(frozen=True)
class ApplyReceipt:
    columns_added: int = 0
    attribute_writes: int = 0
    objects_added: int = 0
    e2o_added: int = 0
    o2o_added: int = 0
    object_types_added: int = 0


# ----------------------------------------------------------------------
# writer lease: FIFO per store file, in-process; BEGIN IMMEDIATE guards
# against writers from other processes.
# ----------------------------------------------------------------------


class _FifoLock:
    def __init__(self):
        self._cond = threading.Condition()
        self._queue: deque = deque()
        self._held = False

    def acquire(self, blocking: bool = True) -> bool:
        token = object()
        with self._cond:
            if not blocking:
                if self._held or self._queue:
                    return False
                self._held = True
                return True
            self._queue.append(token)
            while self._held or self._queue[0] is not token:
                self._cond.wait()
            self._queue.popleft()
            self._held = True
            return True

    def release(self) -> None:
        with self._cond:
            self._held = False
            self._cond.notify_all()


_LEASES: dict = {}
_LEASES_GUARD = threading.Lock()


def _lease_for(path: Path) -> _FifoLock:
    key = str(path)
    with _LEASES_GUARD:
        lock = _LEASES.get(key)
        if lock is None:
            lock = _LEASES[key] = _FifoLock()
        return lock


def _exec(conn, sql: str, params=()):
    """Single funnel for store writes; tests inject faults here."""
    return conn.execute(sql, params)


# ----------------------------------------------------------------------
# loading
# ----------------------------------------------------------------------


def load_ocel(path) -> OcelLog:
    """Materialize an OCEL 2.0 store file into an :class:`OcelLog`.

    Raises SchemaError when a mandatory table is missing and IntegrityError
    when relation rows reference absent events or objects.
    """
    path = Path(path)
    if not path.is_file():
        raise IoError(f"store file not found: {path}")
    conn = sqlite3.connect(f"file:{path.resolve()}?mode=ro", uri=True)
    try:
        return _load(conn)
    except sqlite3.DatabaseError as exc:
        raise SchemaError(f"not a readable SQLite database: {path} ({exc})") from exc
    finally:
        conn.close()


def _table_names(conn) -> list:
    rows = conn.execute(
        "SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name"
    ).fetchall()
    return [r[0] for r in rows if not r[0].startswith("sqlite_")]


def _table_columns(conn, table: str) -> list:
    return [(r[1], r[2]) for r in conn.execute(f"PRAGMA table_info({quote_ident(table)})")]


def _read_type_map(conn, table: str) -> dict:
    mapping: dict = {}
    for ocel_type, mapped in conn.execute(
        f"SELECT ocel_type, ocel_type_map FROM {quote_ident(table)}"
    ):
        if ocel_type in mapping:
            raise IntegrityError(f"duplicate type mapping in {table}: {ocel_type!r}")
        mapping[ocel_type] = mapped
    return mapping


def _load(conn) -> OcelLog:
    tables = _table_names(conn)
    for required in REQUIRED_TABLES:
        if required not in tables:
            raise SchemaError(f"missing mandatory table: {required}", table=required)

    event_map = _read_type_map(conn, "event_map_type")
    object_map = _read_type_map(conn, "object_map_type")
    known = set(REQUIRED_TABLES)
    known.update(f"event_{m}" for m in event_map.values())
    known.update(f"object_{m}" for m in object_map.values())

    # events -------------------------------------------------------------
    event_type: dict = {}
    for ocel_id, ocel_type in conn.execute("SELECT ocel_id, ocel_type FROM event"):
        event_type[ocel_id] = ocel_type

    event_attr_types: dict = {}
    events: list = []
    seen_events: set = set()
    for activity in event_map:
        table = f"event_{event_map[activity]}"
        if table not in tables:
            raise SchemaError(f"missing mandatory table: {table}", table=table)
        cols = _table_columns(conn, table)
        attr_cols = [(n, decl_to_vtype(d)) for n, d in cols if n not in _EVENT_RESERVED]
        event_attr_types[activity] = {n: t for n, t in attr_cols}
        names = [quote_ident(n) for n, _ in cols]
        for row in conn.execute(
            f"SELECT {', '.join(names)} FROM {quote_ident(table)} ORDER BY rowid"
        ):
            values = dict(zip([n for n, _ in cols], row))
            eid = values.get("ocel_id")
            if eid not in event_type:
                raise IntegrityError(
                    f"{table} row references unknown event", rows=[eid])
            if event_type[eid] != activity:
                raise IntegrityError(
                    f"{table} row {eid!r} disagrees with declared event type", rows=[eid])
            # NULL cells mean "no value here", not an explicit null attribute
            attrs = {n: _from_sql(values[n], t) for n, t in attr_cols
                     if values.get(n) is not None}
            events.append(OcelEvent(
                id=eid, activity=activity,
                time=parse_timestamp(values.get("ocel_time")), attributes=attrs))
            seen_events.add(eid)
    missing = [eid for eid in event_type if eid not in seen_events]
    if missing:
        raise IntegrityError("events missing from their type tables", rows=missing)
    events.sort(key=lambda ev: (ev.time, ev.id))

    # objects ------------------------------------------------------------
    object_type_of: dict = {}
    for ocel_id, ocel_type in conn.execute("SELECT ocel_id, ocel_type FROM object"):
        object_type_of[ocel_id] = ocel_type

    object_attr_types: dict = {}
    histories: dict = {oid: [] for oid in object_type_of}
    for otype in object_map:
        table = f"object_{object_map[otype]}"
        if table not in tables:
            raise SchemaError(f"missing mandatory table: {table}", table=table)
        cols = _table_columns(conn, table)
        attr_cols = [(n, decl_to_vtype(d)) for n, d in cols if n not in _OBJECT_RESERVED]
        object_attr_types[otype] = {n: t for n, t in attr_cols}
        names = [quote_ident(n) for n, _ in cols]
        for row in conn.execute(
            f"SELECT {', '.join(names)} FROM {quote_ident(table)} ORDER BY rowid"
        ):
            values = dict(zip([n for n, _ in cols], row))
            oid = values.get("ocel_id")
            if oid not in object_type_of:
                raise IntegrityError(f"{table} row references unknown object", rows=[oid])
            raw_time = values.get("ocel_time")
            time = None if raw_time is None else parse_timestamp(raw_time)
            changed = values.get("ocel_changed_field") or None
            if changed is None:
                for name, vtype in attr_cols:
                    value = values.get(name)
                    if value is not None:
                        histories[oid].append(ObjectAttributeEntry(
                            name=name, value=_from_sql(value, vtype), time=time))
            else:
                vtype = dict(attr_cols).get(changed)
                if vtype is None:
                    raise IntegrityError(
                        f"{table} change row names unknown column {changed!r}", rows=[oid])
                histories[oid].append(ObjectAttributeEntry(
                    name=changed, value=_from_sql(values.get(changed), vtype),
                    time=time, changed_field=changed))

    objects = [
        OcelObject(id=oid, object_type=otype, attribute_history=tuple(histories[oid]))
        for oid, otype in object_type_of.items()
    ]
    objects.sort(key=lambda obj: obj.id)

    # relations ----------------------------------------------------------
    e2o, dangling = [], []
    for ev_id, obj_id, qualifier in conn.execute(
        "SELECT ocel_event_id, ocel_object_id, ocel_qualifier FROM event_object"
    ):
        if ev_id not in event_type or obj_id not in object_type_of:
            dangling.append((ev_id, obj_id, qualifier))
        e2o.append(E2ORelation(ev_id, obj_id, qualifier or ""))
    if dangling:
        raise IntegrityError(
            f"event_object rows reference absent events/objects: {dangling[:5]}",
            rows=dangling)

    o2o = []
    for src, tgt, qualifier in conn.execute(
        "SELECT ocel_source_id, ocel_target_id, ocel_qualifier FROM object_object"
    ):
        if src not in object_type_of or tgt not in object_type_of:
            dangling.append((src, tgt, qualifier))
        o2o.append(O2ORelation(src, tgt, qualifier or ""))
    if dangling:
        raise IntegrityError(
            f"object_object rows reference absent objects: {dangling[:5]}", rows=dangling)

    # unknown tables preserved opaquely ------------------------------------
    extra: dict = {}
    for table in tables:
        if table in known:
            continue
        cols = _table_columns(conn, table)
        names = [quote_ident(n) for n, _ in cols]
        rows = conn.execute(
            f"SELECT {', '.join(names)} FROM {quote_ident(table)} ORDER BY rowid"
        ).fetchall()
        extra[table] = ExtraTable(
            columns=tuple(n for n, _ in cols),
            decl_types=tuple(d for _, d in cols),
            rows=tuple(tuple(r) for r in rows))

    return OcelLog(
        events=tuple(events), objects=tuple(objects), e2o=tuple(e2o), o2o=tuple(o2o),
        event_attr_types=event_attr_types, object_attr_types=object_attr_types,
        extra_tables=extra)


# ----------------------------------------------------------------------
# writing
# ----------------------------------------------------------------------


def write_ocel(log: OcelLog, path, overwrite: bool = False) -> Path:
    """Materialize a log into a fresh OCEL 2.0 store file."""
    path = Path(path)
    if path.exists():
        if not overwrite:
            raise IoError(f"refusing to overwrite existing store: {path}")
        path.unlink()
    path.parent.mkdir(parents=True, exist_ok=True)

    activities = sorted(set(log.event_attr_types) | {ev.activity for ev in log.events})
    otypes = sorted(set(log.object_attr_types) | {o.object_type for o in log.objects})

    taken: set = set()
    event_map = {a: make_mapped_name(a, taken) for a in activities}
    taken.update(event_map.values())
    object_map = {t: make_mapped_name(t, taken) for t in otypes}

    conn = sqlite3.connect(str(path), isolation_level=None)
    try:
        conn.execute("BEGIN")
        conn.execute('CREATE TABLE "event" ("ocel_id" TEXT, "ocel_type" TEXT)')
        conn.execute('CREATE TABLE "object" ("ocel_id" TEXT, "ocel_type" TEXT)')
        conn.execute(
            'CREATE TABLE "event_object" '
            '("ocel_event_id" TEXT, "ocel_object_id" TEXT, "ocel_qualifier" TEXT)')
        conn.execute(
            'CREATE TABLE "object_object" '
            '("ocel_source_id" TEXT, "ocel_target_id" TEXT, "ocel_qualifier" TEXT)')
        conn.execute('CREATE TABLE "event_map_type" ("ocel_type" TEXT, "ocel_type_map" TEXT)')
        conn.execute('CREATE TABLE "object_map_type" ("ocel_type" TEXT, "ocel_type_map" TEXT)')

        event_cols = {a: sorted(log.event_attr_types.get(a, {})) for a in activities}
        for activity in activities:
            cols = "".join(
                f', {quote_ident(n)} {_DECL_BY_VTYPE[log.event_attr_types[activity][n]]}'
                for n in event_cols[activity])
            conn.execute(
                f'CREATE TABLE {quote_ident("event_" + event_map[activity])} '
                f'("ocel_id" TEXT, "ocel_time" TIMESTAMP{cols})')
            conn.execute("INSERT INTO event_map_type VALUES (?, ?)",
                         (activity, event_map[activity]))

        object_cols = {t: sorted(log.object_attr_types.get(t, {})) for t in otypes}
        for otype in otypes:
            cols = "".join(
                f', {quote_ident(n)} {_DECL_BY_VTYPE[log.object_attr_types[otype][n]]}'
                for n in object_cols[otype])
            conn.execute(
                f'CREATE TABLE {quote_ident("object_" + object_map[otype])} '
                f'("ocel_id" TEXT, "ocel_time" TIMESTAMP, "ocel_changed_field" TEXT{cols})')
            conn.execute("INSERT INTO object_map_type VALUES (?, ?)",
                         (otype, object_map[otype]))

        for ev in log.events:
            conn.execute("INSERT INTO event VALUES (?, ?)", (ev.id, ev.activity))
            cols = event_cols[ev.activity]
            names = ", ".join(["ocel_id", "ocel_time"] + [quote_ident(n) for n in cols])
            marks = ", ".join("?" * (2 + len(cols)))
            values = [ev.id, format_timestamp(ev.time)] + [
                _to_sql(ev.attributes.get(n), log.event_attr_types[ev.activity][n])
                for n in cols]
            conn.execute(
                f'INSERT INTO {quote_ident("event_" + event_map[ev.activity])} '
                f'({names}) VALUES ({marks})', values)

        for obj in log.objects:
            conn.execute("INSERT INTO object VALUES (?, ?)", (obj.id, obj.object_type))
            _insert_object_rows(conn, log, obj, object_map[obj.object_type],
                                object_cols[obj.object_type])

        for rel in log.e2o:
            conn.execute("INSERT INTO event_object VALUES (?, ?, ?)",
                         (rel.event_id, rel.object_id, rel.qualifier))
        for rel in log.o2o:
            conn.execute("INSERT INTO object_object VALUES (?, ?, ?)",
                         (rel.source_id, rel.target_id, rel.qualifier))

        for name in sorted(log.extra_tables):
            table = log.extra_tables[name]
            decls = ", ".join(
                f"{quote_ident(c)} {d}".rstrip()
                for c, d in zip(table.columns, table.decl_types))
            conn.execute(f"CREATE TABLE {quote_ident(name)} ({decls})")
            marks = ", ".join("?" * len(table.columns))
            for row in table.rows:
                conn.execute(f"INSERT INTO {quote_ident(name)} VALUES ({marks})", row)

        conn.execute("COMMIT")
    except BaseException:
        try:
            conn.execute("ROLLBACK")
        except sqlite3.Error:
            pass
        raise
    finally:
        conn.close()
    return path


def _insert_object_rows(conn, log, obj, mapped, cols):
    table = quote_ident(f"object_{mapped}")
    vtypes = log.object_attr_types[obj.object_type]
    initial = [en for en in obj.attribute_history if en.changed_field is None]
    changes = [en for en in obj.attribute_history if en.changed_field is not None]
    names = ", ".join(["ocel_id", "ocel_time", "ocel_changed_field"]
                      + [quote_ident(n) for n in cols])
    marks = ", ".join("?" * (3 + len(cols)))

    if initial or not changes:
        time = next((en.time for en in initial if en.time is not None), None)
        by_name = {en.name: en.value for en in initial}
        values = [obj.id, None if time is None else format_timestamp(time), None] + [
            _to_sql(by_name.get(n), vtypes[n]) for n in cols]
        conn.execute(f"INSERT INTO {table} ({names}) VALUES ({marks})", values)
    for en in changes:
        values = [obj.id, None if en.time is None else format_timestamp(en.time), en.name] + [
            _to_sql(en.value, vtypes[n]) if n == en.name else None for n in cols]
        conn.execute(f"INSERT INTO {table} ({names}) VALUES ({marks})", values)


# ----------------------------------------------------------------------
# applying additions
# ----------------------------------------------------------------------


def apply_additions(path, additions: AdditionSet, *, blocking: bool = True) -> ApplyReceipt:
    """Apply an :class:`AdditionSet` to a store file, all-or-nothing.

    Takes the per-file writer lease (FIFO); with ``blocking=False`` an
    already-held lease raises :class:`LeaseHeld` instead of queueing.
    """
    path = Path(path).resolve()
    if not path.is_file():
        raise IoError(f"store file not found: {path}")
    lease = _lease_for(path)
    if not lease.acquire(blocking=blocking):
        raise LeaseHeld(f"writer lease held for {path}")
    try:
        conn = sqlite3.connect(str(path), timeout=30.0, isolation_level=None)
        try:
            conn.execute("BEGIN IMMEDIATE")
            receipt = _apply(conn, additions)
            conn.execute("COMMIT")
            return receipt
        except BaseException:
            try:
                conn.execute("ROLLBACK")
            except sqlite3.Error:
                pass
            raise
        finally:
            conn.close()
    finally:
        lease.release()


def _apply(conn, additions: AdditionSet) -> ApplyReceipt:
    tables = _table_names(conn)
    for required in REQUIRED_TABLES:
        if required not in tables:
            raise SchemaError(f"missing mandatory table: {required}", table=required)
    event_map = _read_type_map(conn, "event_map_type")
    object_map = _read_type_map(conn, "object_map_type")
    event_cols = {a: dict(_table_columns(conn, f"event_{m}")) for a, m in event_map.items()}
    object_cols = {t: dict(_table_columns(conn, f"object_{m}")) for t, m in object_map.items()}
    event_type = dict(conn.execute("SELECT ocel_id, ocel_type FROM event"))
    object_type_of = dict(conn.execute("SELECT ocel_id, ocel_type FROM object"))

    _validate_additions(additions, event_map, object_map, event_cols, object_cols,
                        event_type, object_type_of)

    # 1. declare new object types and create their tables
    taken = set(event_map.values()) | set(object_map.values())
    for otype in additions.new_object_types:
        mapped = make_mapped_name(otype, taken)
        taken.add(mapped)
        object_map[otype] = mapped
        object_cols[otype] = {}
        _exec(conn, f'CREATE TABLE {quote_ident("object_" + mapped)} '
                    '("ocel_id" TEXT, "ocel_time" TIMESTAMP, "ocel_changed_field" TEXT)')
        _exec(conn, "INSERT INTO object_map_type VALUES (?, ?)", (otype, mapped))

    # 2. new attribute columns
    new_event_vtype = {}
    for activity, attr, vtype in additions.new_event_attribute_columns:
        _exec(conn, f'ALTER TABLE {quote_ident("event_" + event_map[activity])} '
                    f'ADD COLUMN {quote_ident(attr)} {_DECL_BY_VTYPE[vtype]}')
        new_event_vtype[(activity, attr)] = vtype
    new_object_vtype = {}
    for otype, attr, vtype in additions.new_object_attribute_columns:
        _exec(conn, f'ALTER TABLE {quote_ident("object_" + object_map[otype])} '
                    f'ADD COLUMN {quote_ident(attr)} {_DECL_BY_VTYPE[vtype]}')
        new_object_vtype[(otype, attr)] = vtype

    # 3. new objects with their histories
    for obj in additions.new_objects:
        _exec(conn, "INSERT INTO object VALUES (?, ?)", (obj.id, obj.object_type))
        object_type_of[obj.id] = obj.object_type
        vtypes = {
            **{n: decl_to_vtype(d) for n, d in object_cols[obj.object_type].items()
               if n not in _OBJECT_RESERVED},
            **{a: v for (t, a), v in new_object_vtype.items() if t == obj.object_type},
        }
        table = quote_ident(f"object_{object_map[obj.object_type]}")
        initial = [en for en in obj.attribute_history if en.changed_field is None]
        changes = [en for en in obj.attribute_history if en.changed_field is not None]
        if initial or not changes:
            time = next((en.time for en in initial if en.time is not None), None)
            cols = ["ocel_id", "ocel_time", "ocel_changed_field"] + [en.name for en in initial]
            vals = [obj.id, None if time is None else format_timestamp(time), None] + [
                _to_sql(en.value, vtypes[en.name]) for en in initial]
            _exec(conn, f'INSERT INTO {table} ({", ".join(quote_ident(c) for c in cols)}) '
                        f'VALUES ({", ".join("?" * len(vals))})', vals)
        for en in changes:
            vals = [obj.id, None if en.time is None else format_timestamp(en.time),
                    en.name, _to_sql(en.value, vtypes[en.name])]
            _exec(conn, f'INSERT INTO {table} '
                        f'("ocel_id", "ocel_time", "ocel_changed_field", {quote_ident(en.name)}) '
                        'VALUES (?, ?, ?, ?)', vals)

    # 4. event attribute writes (fill cells of columns added above)
    for event_id, attr, value in additions.event_attribute_writes:
        activity = event_type[event_id]
        vtype = new_event_vtype[(activity, attr)]
        _exec(conn, f'UPDATE {quote_ident("event_" + event_map[activity])} '
                    f'SET {quote_ident(attr)} = ? WHERE ocel_id = ?',
              (_to_sql(value, vtype), event_id))

    # 5. object attribute history rows
    for object_id, attr, value, time in additions.object_attribute_rows:
        otype = object_type_of[object_id]
        vtype = new_object_vtype.get((otype, attr))
        if vtype is None:
            vtype = decl_to_vtype(object_cols[otype][attr])
        _exec(conn, f'INSERT INTO {quote_ident("object_" + object_map[otype])} '
                    f'("ocel_id", "ocel_time", "ocel_changed_field", {quote_ident(attr)}) '
                    'VALUES (?, ?, ?, ?)',
              (object_id, format_timestamp(time), attr, _to_sql(value, vtype)))

    # 6. relations
    for rel in additions.new_e2o:
        _exec(conn, "INSERT INTO event_object VALUES (?, ?, ?)",
              (rel.event_id, rel.object_id, rel.qualifier))
    for rel in additions.new_o2o:
        _exec(conn, "INSERT INTO object_object VALUES (?, ?, ?)",
              (rel.source_id, rel.target_id, rel.qualifier))

    return ApplyReceipt(
        columns_added=len(additions.new_event_attribute_columns)
        + len(additions.new_object_attribute_columns),
        attribute_writes=len(additions.event_attribute_writes)
        + len(additions.object_attribute_rows),
        objects_added=len(additions.new_objects),
        e2o_added=len(additions.new_e2o),
        o2o_added=len(additions.new_o2o),
        object_types_added=len(additions.new_object_types),
    )


def _validate_additions(additions, event_map, object_map, event_cols, object_cols,
                        event_type, object_type_of):
    new_types = list(additions.new_object_types)
    for otype in new_types:
        if not otype:
            raise IntegrityError("empty object type name")
        if otype in object_map:
            raise MigrationConflict(f"object type already declared: {otype!r}")
    if len(set(new_types)) != len(new_types):
        raise MigrationConflict("duplicate object type declarations in addition set")

    seen_cols: set = set()
    for activity, attr, vtype in additions.new_event_attribute_columns:
        if vtype not in VALUE_TYPES:
            raise IntegrityError(f"unknown value type {vtype!r} for column {attr!r}")
        if not attr or attr in _EVENT_RESERVED:
            raise IntegrityError(f"invalid event attribute name: {attr!r}")
        if activity not in event_map:
            raise IntegrityError(f"activity not declared in store: {activity!r}")
        existing = event_cols[activity].get(attr)
        if existing is not None:
            kind = ("same" if decl_to_vtype(existing) == vtype else "different")
            raise MigrationConflict(
                f"column {attr!r} already exists on activity {activity!r} "
                f"with {kind} type")
        if ("event", activity, attr) in seen_cols:
            raise MigrationConflict(f"duplicate column declaration: {activity!r}.{attr!r}")
        seen_cols.add(("event", activity, attr))

    known_otypes = set(object_map) | set(new_types)
    for otype, attr, vtype in additions.new_object_attribute_columns:
        if vtype not in VALUE_TYPES:
            raise IntegrityError(f"unknown value type {vtype!r} for column {attr!r}")
        if not attr or attr in _OBJECT_RESERVED:
            raise IntegrityError(f"invalid object attribute name: {attr!r}")
        if otype not in known_otypes:
            raise IntegrityError(f"object type not declared or added: {otype!r}")
        existing = object_cols.get(otype, {}).get(attr)
        if existing is not None:
            kind = ("same" if decl_to_vtype(existing) == vtype else "different")
            raise MigrationConflict(
                f"column {attr!r} already exists on object type {otype!r} "
                f"with {kind} type")
        if ("object", otype, attr) in seen_cols:
            raise MigrationConflict(f"duplicate column declaration: {otype!r}.{attr!r}")
        seen_cols.add(("object", otype, attr))

    new_event_cols = {(a, n): v for a, n, v in additions.new_event_attribute_columns}
    seen_writes: set = set()
    for event_id, attr, value in additions.event_attribute_writes:
        if event_id not in event_type:
            raise IntegrityError(f"write references absent event {event_id!r}",
                                 rows=[event_id])
        activity = event_type[event_id]
        vtype = new_event_cols.get((activity, attr))
        if vtype is None:
            raise IntegrityError(
                f"write to {attr!r} on event {event_id!r} targets a column "
                "not introduced by this addition set")
        if not _value_matches(value, vtype):
            raise IntegrityError(
                f"value {value!r} does not match declared type {vtype} of {attr!r}")
        if (event_id, attr) in seen_writes:
            raise IntegrityError(f"duplicate write to ({event_id!r}, {attr!r})")
        seen_writes.add((event_id, attr))

    new_ids: set = set()
    for obj in additions.new_objects:
        if not obj.id:
            raise IntegrityError("new object with empty id")
        if obj.id in object_type_of or obj.id in new_ids:
            raise IntegrityError(f"object id already exists: {obj.id!r}", rows=[obj.id])
        if obj.object_type not in known_otypes:
            raise IntegrityError(
                f"new object {obj.id!r} has undeclared type {obj.object_type!r}")
        new_ids.add(obj.id)
        declared = {n for n in object_cols.get(obj.object_type, {})
                    if n not in _OBJECT_RESERVED}
        declared.update(a for (t, a) in
                        {(t, a) for t, a, _ in additions.new_object_attribute_columns}
                        if t == obj.object_type)
        for en in obj.attribute_history:
            if en.name not in declared:
                raise IntegrityError(
                    f"object {obj.id!r} carries undeclared attribute {en.name!r}")

    new_object_cols = {(t, a): v for t, a, v in additions.new_object_attribute_columns}
    for object_id, attr, value, time in additions.object_attribute_rows:
        otype = object_type_of.get(object_id)
        if otype is None and object_id in new_ids:
            otype = next(o.object_type for o in additions.new_objects if o.id == object_id)
        if otype is None:
            raise IntegrityError(f"attribute row references absent object {object_id!r}",
                                 rows=[object_id])
        vtype = new_object_cols.get((otype, attr))
        if vtype is None:
            existing = object_cols.get(otype, {}).get(attr)
            if existing is None or attr in _OBJECT_RESERVED:
                raise IntegrityError(
                    f"attribute row names unknown column {attr!r} on {otype!r}")
            vtype = decl_to_vtype(existing)
        if not _value_matches(value, vtype):
            raise IntegrityError(
                f"value {value!r} does not match declared type {vtype} of {attr!r}")
        if not isinstance(time, datetime):
            raise IntegrityError(f"attribute row for {object_id!r} lacks a timestamp")

    all_objects = set(object_type_of) | new_ids
    for rel in additions.new_e2o:
        if rel.event_id not in event_type:
            raise IntegrityError(f"e2o references absent event {rel.event_id!r}",
                                 rows=[(rel.event_id, rel.object_id)])
        if rel.object_id not in all_objects:
            raise IntegrityError(f"e2o references absent object {rel.object_id!r}",
                                 rows=[(rel.event_id, rel.object_id)])
    for rel in additions.new_o2o:
        if rel.source_id not in all_objects or rel.target_id not in all_objects:
            raise IntegrityError(
                f"o2o references absent object: {rel.source_id!r} -> {rel.target_id!r}",
                rows=[(rel.source_id, rel.target_id)])


# ----------------------------------------------------------------------
# snapshots (used by tests and the CLI to prove non-destructiveness)
# ----------------------------------------------------------------------


def table_snapshot(path) -> dict:
    """{table: (columns, Counter of row tuples)} for every table in a store."""
    path = Path(path)
    conn = sqlite3.connect(f"file:{path.resolve()}?mode=ro", uri=True)
    try:
        out = {}
        for table in _table_names(conn):
            cols = [n for n, _ in _table_columns(conn, table)]
            names = ", ".join(quote_ident(c) for c in cols)
            rows = conn.execute(f"SELECT {names} FROM {quote_ident(table)}").fetchall()
            out[table] = (tuple(cols), Counter(tuple(r) for r in rows))
        return out
    finally:
        conn.close()
