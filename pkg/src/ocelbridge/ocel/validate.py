"""Structural checks over an in-memory log.

Loading already rejects broken stores; this reports problems in logs
assembled programmatically before they are written anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import OcelLog, infer_value_type


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    message: str


def validate_ocel(log: OcelLog) -> list:
    """Return all violations found; an empty list means the log is sound."""
    out: list = []

    seen: set = set()
    for ev in log.events:
        if ev.id in seen:
            out.append(Violation("duplicate-event-id", ev.id,
                                 f"event id {ev.id!r} appears more than once"))
        seen.add(ev.id)
        if ev.time.tzinfo is None:
            out.append(Violation("naive-timestamp", ev.id,
                                 f"event {ev.id!r} has a timezone-naive time"))
        declared = log.event_attr_types.get(ev.activity, {})
        for name, value in ev.attributes.items():
            if name not in declared:
                out.append(Violation(
                    "undeclared-attribute", ev.id,
                    f"event {ev.id!r} carries undeclared attribute {name!r}"))
            elif value is not None and infer_value_type(value) != declared[name]:
                out.append(Violation(
                    "type-mismatch", ev.id,
                    f"event {ev.id!r} attribute {name!r} is {infer_value_type(value)}, "
                    f"declared {declared[name]}"))

    seen = set()
    for obj in log.objects:
        if obj.id in seen:
            out.append(Violation("duplicate-object-id", obj.id,
                                 f"object id {obj.id!r} appears more than once"))
        seen.add(obj.id)
        declared = log.object_attr_types.get(obj.object_type, {})
        last_time: dict = {}
        for en in obj.attribute_history:
            if en.name not in declared:
                out.append(Violation(
                    "undeclared-attribute", obj.id,
                    f"object {obj.id!r} carries undeclared attribute {en.name!r}"))
            elif en.value is not None and infer_value_type(en.value) != declared[en.name]:
                out.append(Violation(
                    "type-mismatch", obj.id,
                    f"object {obj.id!r} attribute {en.name!r} is "
                    f"{infer_value_type(en.value)}, declared {declared[en.name]}"))
            if en.changed_field is not None:
                if en.time is None:
                    out.append(Violation(
                        "missing-change-time", obj.id,
                        f"object {obj.id!r} change of {en.name!r} lacks a timestamp"))
                else:
                    prev = last_time.get(en.name)
                    if prev is not None and en.time < prev:
                        out.append(Violation(
                            "unordered-history", obj.id,
                            f"object {obj.id!r} attribute {en.name!r} history "
                            "is not time-ordered"))
                    last_time[en.name] = en.time

    event_ids = {ev.id for ev in log.events}
    object_ids = {obj.id for obj in log.objects}
    seen_rel: set = set()
    for rel in log.e2o:
        if rel.event_id not in event_ids:
            out.append(Violation("dangling-relation", rel.event_id,
                                 f"e2o references absent event {rel.event_id!r}"))
        if rel.object_id not in object_ids:
            out.append(Violation("dangling-relation", rel.object_id,
                                 f"e2o references absent object {rel.object_id!r}"))
        key = (rel.event_id, rel.object_id, rel.qualifier)
        if key in seen_rel:
            out.append(Violation("duplicate-relation", rel.event_id,
                                 f"duplicate e2o row {key!r}"))
        seen_rel.add(key)
    seen_rel = set()
    for rel in log.o2o:
        if rel.source_id not in object_ids:
            out.append(Violation("dangling-relation", rel.source_id,
                                 f"o2o references absent object {rel.source_id!r}"))
        if rel.target_id not in object_ids:
            out.append(Violation("dangling-relation", rel.target_id,
                                 f"o2o references absent object {rel.target_id!r}"))
        key = (rel.source_id, rel.target_id, rel.qualifier)
        if key in seen_rel:
            out.append(Violation("duplicate-relation", rel.source_id,
                                 f"duplicate o2o row {key!r}"))
        seen_rel.add(key)

    return out
