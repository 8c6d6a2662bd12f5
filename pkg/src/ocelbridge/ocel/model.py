"""In-memory model of an OCEL 2.0 relational log.

An :class:`OcelLog` is immutable after construction and safe to share
across threads; all mutation of a store happens through
:func:`ocelbridge.ocel.storage.apply_additions`.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime
from functools import cached_property
from typing import Any

from ..timeutil import format_timestamp

#: attribute value types supported in stores
VALUE_TYPES = ("string", "integer", "float", "boolean", "timestamp")


def infer_value_type(value: Any) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, float):
        return "float"
    if isinstance(value, datetime):
        return "timestamp"
    return "string"


@dataclass(frozen=True)
class OcelEvent:
    id: str
    activity: str
    time: datetime
    attributes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ObjectAttributeEntry:
    """One temporal attribute row of an object.

    ``changed_field`` is None for entries coming from the object's initial
    row and carries the attribute name for later change rows.
    """

    name: str
    value: Any
    time: datetime | None
    changed_field: str | None = None


@dataclass(frozen=True)
class OcelObject:
    id: str
    object_type: str
    attribute_history: tuple = ()


@dataclass(frozen=True)
class E2ORelation:
    event_id: str
    object_id: str
    qualifier: str


@dataclass(frozen=True)
class O2ORelation:
    source_id: str
    target_id: str
    qualifier: str


@dataclass(frozen=True)
class ExtraTable:
    """An unknown table preserved verbatim for round-trips."""

    columns: tuple
    decl_types: tuple
    rows: tuple


@dataclass(eq=False)
class OcelLog:
    """Materialized OCEL 2.0 log. Treat as immutable after construction."""

    events: tuple = ()
    objects: tuple = ()
    e2o: tuple = ()
    o2o: tuple = ()
    #: declared attribute columns per activity: {activity: {name: value_type}}
    event_attr_types: dict = field(default_factory=dict)
    #: declared attribute columns per object type
    object_attr_types: dict = field(default_factory=dict)
    extra_tables: dict = field(default_factory=dict)

    @classmethod
    def build(cls, events=(), objects=(), e2o=(), o2o=(),
              event_attr_types=None, object_attr_types=None) -> "OcelLog":
        """Construct a log, deriving declared attribute columns from the data
        where they are not given explicitly."""
        events = tuple(events)
        objects = tuple(objects)
        eat = {a: dict(cols) for a, cols in (event_attr_types or {}).items()}
        for ev in events:
            cols = eat.setdefault(ev.activity, {})
            for name, value in ev.attributes.items():
                if name not in cols:
                    cols[name] = "string" if value is None else infer_value_type(value)
        oat = {t: dict(cols) for t, cols in (object_attr_types or {}).items()}
        for obj in objects:
            cols = oat.setdefault(obj.object_type, {})
            for entry in obj.attribute_history:
                if entry.name not in cols:
                    cols[entry.name] = (
                        "string" if entry.value is None else infer_value_type(entry.value)
                    )
        return cls(events=events, objects=objects, e2o=tuple(e2o), o2o=tuple(o2o),
                   event_attr_types=eat, object_attr_types=oat)

    # ------------------------------------------------------------------
    # derived indexes (computed once; the log itself never changes)
    # ------------------------------------------------------------------

    @cached_property
    def events_by_id(self) -> dict:
        return {ev.id: ev for ev in self.events}

    @cached_property
    def objects_by_id(self) -> dict:
        return {obj.id: obj for obj in self.objects}

    @cached_property
    def events_by_activity(self) -> dict:
        out: dict = {}
        for ev in self.events:
            out.setdefault(ev.activity, []).append(ev)
        return {a: tuple(evs) for a, evs in out.items()}

    @cached_property
    def objects_by_type(self) -> dict:
        out: dict = {}
        for obj in self.objects:
            out.setdefault(obj.object_type, []).append(obj)
        return {t: tuple(objs) for t, objs in out.items()}

    @cached_property
    def e2o_by_event(self) -> dict:
        out: dict = {}
        for rel in self.e2o:
            out.setdefault(rel.event_id, []).append(rel)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def e2o_by_object(self) -> dict:
        out: dict = {}
        for rel in self.e2o:
            out.setdefault(rel.object_id, []).append(rel)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def activities(self) -> tuple:
        """All known activities: declared ones plus any observed on events."""
        names = set(self.event_attr_types)
        names.update(ev.activity for ev in self.events)
        return tuple(sorted(names))

    @cached_property
    def object_types(self) -> tuple:
        names = set(self.object_attr_types)
        names.update(obj.object_type for obj in self.objects)
        return tuple(sorted(names))

    def related_events(self, object_id: str) -> tuple:
        """Events related to an object, ordered by (time, event id)."""
        rels = self.e2o_by_object.get(object_id, ())
        seen = set()
        events = []
        for rel in rels:
            if rel.event_id in seen:
                continue
            seen.add(rel.event_id)
            ev = self.events_by_id.get(rel.event_id)
            if ev is not None:
                events.append(ev)
        events.sort(key=lambda ev: (ev.time, ev.id))
        return tuple(events)

    def lifecycle_span(self, object_id: str):
        """(first, last) related-event time of an object, or None."""
        events = self.related_events(object_id)
        if not events:
            return None
        return events[0].time, events[-1].time

    # ------------------------------------------------------------------

    def fingerprint(self) -> str:
        """Content hash over the canonical representation of the log."""
        digest = hashlib.sha256()

        def feed(obj):
            digest.update(json.dumps(obj, sort_keys=True, default=_canon).encode())

        feed([(ev.id, ev.activity, format_timestamp(ev.time),
               sorted(ev.attributes.items(), key=lambda kv: kv[0]))
              for ev in sorted(self.events, key=lambda e: e.id)])
        feed([(obj.id, obj.object_type,
               [(en.name, en.value, None if en.time is None else format_timestamp(en.time),
                 en.changed_field) for en in obj.attribute_history])
              for obj in sorted(self.objects, key=lambda o: o.id)])
        feed(sorted((r.event_id, r.object_id, r.qualifier) for r in self.e2o))
        feed(sorted((r.source_id, r.target_id, r.qualifier) for r in self.o2o))
        feed({a: sorted(cols.items()) for a, cols in self.event_attr_types.items()})
        feed({t: sorted(cols.items()) for t, cols in self.object_attr_types.items()})
        return digest.hexdigest()


def _canon(value):
    if isinstance(value, datetime):
        return format_timestamp(value)
    raise TypeError(f"not canonicalizable: {value!r}")
