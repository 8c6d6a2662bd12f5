"""Join readings to events or objects under a correlation rule.

The explicit modes match on exact id equality against the reading's
event_ref / object_ref. time_window tests the reading time against an
inclusive interval around event times; lifecycle_span tests it against
the [first, last] related-event time of an object. When the rule's
natural anchor (event or object) differs from the target kind, the match
is lifted across the log's E2O relations, optionally restricted to
``object_type_scope``.
"""

from __future__ import annotations

from datetime import timedelta

from ..errors import CorrelationError, NotFound, SpecError
from ..ocel.model import OcelLog


def correlate(readings, log: OcelLog, rule, target: str, target_kind: str | None = None):
    """Match readings to targets; returns {target id: sorted reading indices}.

    Every target id appears as a key, empty groups included. ``target_kind``
    is "event" or "object"; when omitted it is inferred from the log.
    """
    if target_kind is None:
        is_activity = target in log.activities
        is_otype = target in log.object_types
        if is_activity and is_otype:
            raise SpecError(
                f"{target!r} names both an activity and an object type; "
                "pass target_kind")
        if not (is_activity or is_otype):
            raise NotFound(f"target not in log: {target!r}")
        target_kind = "event" if is_activity else "object"
    elif target_kind == "event":
        if target not in log.activities:
            raise NotFound(f"activity not in log: {target!r}")
    elif target_kind == "object":
        if target not in log.object_types:
            raise NotFound(f"object type not in log: {target!r}")
    else:
        raise SpecError(f"target_kind must be 'event' or 'object': {target_kind!r}")

    if readings:
        if rule.mode == "explicit_event_key" and not any(r.event_ref for r in readings):
            raise CorrelationError(
                "explicit_event_key but no reading has event_ref populated")
        if rule.mode == "explicit_object_key" and not any(r.object_ref for r in readings):
            raise CorrelationError(
                "explicit_object_key but no reading has object_ref populated")

    if target_kind == "event":
        matches = _match_events(readings, log, rule, target)
    else:
        matches = _match_objects(readings, log, rule, target)
    return {tid: sorted(idx) for tid, idx in matches.items()}


def _in_window(reading_time, event_time, rule) -> bool:
    lo = event_time - timedelta(seconds=rule.window_before_s)
    hi = event_time + timedelta(seconds=rule.window_after_s)
    return lo <= reading_time <= hi


def _scoped(log, object_id: str, scope: str | None) -> bool:
    obj = log.objects_by_id.get(object_id)
    return obj is not None and (scope is None or obj.object_type == scope)


def _match_events(readings, log, rule, activity):
    events = sorted(log.events_by_activity.get(activity, ()),
                    key=lambda ev: (ev.time, ev.id))
    matches = {ev.id: set() for ev in events}

    if rule.mode == "explicit_event_key":
        for i, r in enumerate(readings):
            if r.event_ref in matches:
                matches[r.event_ref].add(i)

    elif rule.mode == "explicit_object_key":
        # reading names an object; lift to that object's events of the activity
        for i, r in enumerate(readings):
            if not r.object_ref or not _scoped(log, r.object_ref, rule.object_type_scope):
                continue
            for rel in log.e2o_by_object.get(r.object_ref, ()):
                if rel.event_id in matches:
                    matches[rel.event_id].add(i)

    elif rule.mode == "time_window":
        for ev in events:
            group = matches[ev.id]
            for i, r in enumerate(readings):
                if _in_window(r.result_time, ev.time, rule):
                    group.add(i)

    else:  # lifecycle_span: via objects related to the event
        spans = {}
        for ev in events:
            group = matches[ev.id]
            for rel in log.e2o_by_event.get(ev.id, ()):
                if not _scoped(log, rel.object_id, rule.object_type_scope):
                    continue
                if rel.object_id not in spans:
                    spans[rel.object_id] = log.lifecycle_span(rel.object_id)
                span = spans[rel.object_id]
                if span is None:
                    continue
                for i, r in enumerate(readings):
                    if span[0] <= r.result_time <= span[1]:
                        group.add(i)

    return matches


def _match_objects(readings, log, rule, object_type):
    objects = sorted(log.objects_by_type.get(object_type, ()), key=lambda o: o.id)
    matches = {obj.id: set() for obj in objects}

    if rule.mode == "explicit_object_key":
        for i, r in enumerate(readings):
            if r.object_ref in matches:
                matches[r.object_ref].add(i)

    elif rule.mode == "explicit_event_key":
        # reading names an event; lift to the event's objects of the target type
        for i, r in enumerate(readings):
            if not r.event_ref:
                continue
            for rel in log.e2o_by_event.get(r.event_ref, ()):
                if rel.object_id in matches:
                    matches[rel.object_id].add(i)

    elif rule.mode == "time_window":
        # window around any related event of the object
        for obj in objects:
            group = matches[obj.id]
            related = log.related_events(obj.id)
            for i, r in enumerate(readings):
                if any(_in_window(r.result_time, ev.time, rule) for ev in related):
                    group.add(i)

    else:  # lifecycle_span
        for obj in objects:
            span = log.lifecycle_span(obj.id)
            if span is None:
                continue
            group = matches[obj.id]
            for i, r in enumerate(readings):
                if span[0] <= r.result_time <= span[1]:
                    group.add(i)

    return matches
