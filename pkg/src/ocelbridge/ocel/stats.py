"""Read-only exploration: headline counts and directly-follows graphs."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..errors import NotFound
from .model import OcelLog


@dataclass(frozen=True)
class OcelStats:
    event_count: int
    object_count: int
    activity_count: int
    object_type_count: int
    e2o_count: int
    o2o_count: int
    per_activity_counts: dict
    per_object_type_counts: dict


def log_statistics(log: OcelLog) -> OcelStats:
    per_activity = {a: len(log.events_by_activity.get(a, ())) for a in log.activities}
    per_otype = {t: len(log.objects_by_type.get(t, ())) for t in log.object_types}
    return OcelStats(
        event_count=len(log.events),
        object_count=len(log.objects),
        activity_count=len(log.activities),
        object_type_count=len(log.object_types),
        e2o_count=len(log.e2o),
        o2o_count=len(log.o2o),
        per_activity_counts=per_activity,
        per_object_type_counts=per_otype,
    )


@dataclass(frozen=True)
class DfgEdge:
    source: str
    target: str
    count: int


def directly_follows(log: OcelLog, object_type: str) -> list:
    """Directly-follows edges over events of objects of one type.

    Per object, its related events are ordered by (time, event id); each
    consecutive pair contributes one edge between the two activities.
    """
    if object_type not in log.object_types:
        raise NotFound(f"object type not in log: {object_type!r}")
    counts: Counter = Counter()
    for obj in log.objects_by_type.get(object_type, ()):
        trace = log.related_events(obj.id)
        for prev, nxt in zip(trace, trace[1:]):
            counts[(prev.activity, nxt.activity)] += 1
    return [DfgEdge(source=s, target=t, count=c)
            for (s, t), c in sorted(counts.items())]
