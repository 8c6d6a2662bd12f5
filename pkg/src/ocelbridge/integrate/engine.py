"""Plan and execute one integration: spec + log + readings -> AdditionSet.

plan() is the dry run: it correlates, computes every value exactly as
execute would, and reports match statistics plus a value preview.
execute() re-derives the same computation, guarded by content hashes of
the log and the readings, and emits the AdditionSet plus its audit
report. Neither touches the store; applying is the caller's step.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from ..errors import CollisionError, EmptyAggregation, NotFound, PlanInvalidated
from ..ocel.model import OcelLog, OcelObject, E2ORelation, O2ORelation
from ..ocel.storage import AdditionSet
from .correlate import correlate
from .manipulate import aggregate, filter_range
from .spec import IntegrationSpec

RAW_MULTI_WARNING = "raw multi-valued: serialized list"


@dataclass(frozen=True)
class EnrichmentPlan:
    spec: IntegrationSpec
    match_groups: tuple  # (target id, matched reading count) per target
    unmatched_target_count: int
    unmatched_reading_count: int
    preview_values: tuple  # (target id, value) in write order, truncated
    warnings: tuple
    log_fingerprint: str
    readings_fingerprint: str


@dataclass(frozen=True)
class EnrichmentReport:
    columns_added: int
    attribute_writes: int
    objects_added: int
    e2o_added: int
    o2o_added: int
    warnings: tuple


def readings_fingerprint(readings) -> str:
    from ..iotschema.model import reading_to_row

    feed = json.dumps([reading_to_row(r) for r in readings],
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(feed.encode("utf-8")).hexdigest()


def plan(spec: IntegrationSpec, log: OcelLog, readings,
         preview_limit: int | None = 10) -> EnrichmentPlan:
    comp = _compute(spec, log, readings)
    preview = comp["values"]
    if preview_limit is not None:
        preview = preview[:preview_limit]
    return EnrichmentPlan(
        spec=spec,
        match_groups=tuple(comp["match_groups"]),
        unmatched_target_count=comp["unmatched_target_count"],
        unmatched_reading_count=comp["unmatched_reading_count"],
        preview_values=tuple(preview),
        warnings=tuple(comp["warnings"]),
        log_fingerprint=log.fingerprint(),
        readings_fingerprint=readings_fingerprint(readings),
    )


def execute(pln: EnrichmentPlan, log: OcelLog, readings):
    """Build the AdditionSet a reviewed plan promised. Hash-guarded."""
    if pln.log_fingerprint != log.fingerprint():
        raise PlanInvalidated("log changed since the plan was made")
    if pln.readings_fingerprint != readings_fingerprint(readings):
        raise PlanInvalidated("readings changed since the plan was made")

    spec = pln.spec
    comp = _compute(spec, log, readings)
    additions = AdditionSet()

    if spec.pattern == "event_attribute":
        additions.new_event_attribute_columns.append(
            (spec.target, spec.attribute_name, comp["column_vtype"]))
        additions.event_attribute_writes.extend(
            (tid, spec.attribute_name, value) for tid, value in comp["event_writes"])
    else:
        additions.new_object_attribute_columns.append(
            (spec.target, spec.attribute_name, comp["column_vtype"]))
        additions.object_attribute_rows.extend(
            (tid, spec.attribute_name, value, time)
            for tid, value, time in comp["object_rows"])

    if spec.materialize_devices:
        _materialize(spec, log, comp, additions)

    report = EnrichmentReport(
        columns_added=len(additions.new_event_attribute_columns)
        + len(additions.new_object_attribute_columns),
        attribute_writes=len(additions.event_attribute_writes)
        + len(additions.object_attribute_rows),
        objects_added=len(additions.new_objects),
        e2o_added=len(additions.new_e2o),
        o2o_added=len(additions.new_o2o),
        warnings=tuple(comp["warnings"]),
    )
    return additions, report


def _materialize(spec, log, comp, additions: AdditionSet):
    devices = comp["matched_devices"]
    if not devices:
        return
    declared = spec.device_type in log.object_types
    if not declared:
        additions.new_object_types.append(spec.device_type)
    for device_id in devices:
        existing = log.objects_by_id.get(device_id)
        if existing is None:
            additions.new_objects.append(OcelObject(
                id=device_id, object_type=spec.device_type, attribute_history=()))
        elif existing.object_type != spec.device_type:
            raise CollisionError(
                f"device id {device_id!r} already names an object of type "
                f"{existing.object_type!r}")

    if spec.pattern == "event_attribute":
        present = {(rel.event_id, rel.object_id, rel.qualifier) for rel in log.e2o}
        for event_id, device_id in comp["device_links"]:
            row = (event_id, device_id, spec.qualifier)
            if row not in present:
                present.add(row)
                additions.new_e2o.append(E2ORelation(*row))
    else:
        present = {(rel.source_id, rel.target_id, rel.qualifier) for rel in log.o2o}
        for object_id, device_id in comp["device_links"]:
            row = (device_id, object_id, spec.qualifier)
            if row not in present:
                present.add(row)
                additions.new_o2o.append(O2ORelation(*row))


def _compute(spec: IntegrationSpec, log: OcelLog, readings) -> dict:
    target_kind = "event" if spec.pattern == "event_attribute" else "object"

    if target_kind == "event":
        if spec.target not in log.activities:
            raise NotFound(f"activity not in log: {spec.target!r}")
        if spec.attribute_name in log.event_attr_types.get(spec.target, {}):
            raise CollisionError(
                f"attribute {spec.attribute_name!r} already exists on "
                f"activity {spec.target!r}")
    else:
        if spec.target not in log.object_types:
            raise NotFound(f"object type not in log: {spec.target!r}")
        if spec.attribute_name in log.object_attr_types.get(spec.target, {}):
            raise CollisionError(
                f"attribute {spec.attribute_name!r} already exists on "
                f"object type {spec.target!r}")

    relevant = [r for r in readings if r.device_type == spec.device_type]
    matches = correlate(relevant, log, spec.correlation, spec.target, target_kind)

    warnings: list = []
    event_writes: list = []  # (event id, cell value)
    object_groups: list = []  # (object id, [(value, reading time)], group time)
    matched_idx: set = set()
    device_links: list = []  # (target id, device id)
    kind = spec.manipulation.kind

    for target_id, idx in matches.items():
        matched_idx.update(idx)
        group = [relevant[i] for i in idx]
        seen_devices: set = set()
        for r in group:
            if r.device_id not in seen_devices:
                seen_devices.add(r.device_id)
                device_links.append((target_id, r.device_id))
        if not group:
            warnings.append(f"empty match group: {target_id}")
            continue

        if kind == "raw":
            values = [r.value_numeric if r.value_numeric is not None else r.value_text
                      for r in group]
            if target_kind == "event":
                if len(values) > 1:
                    warnings.append(RAW_MULTI_WARNING)
                    event_writes.append((target_id, values))
                else:
                    event_writes.append((target_id, values[0]))
            else:
                object_groups.append(
                    (target_id, [(v, r.result_time) for v, r in zip(values, group)], None))
            continue

        if kind == "filter_then_aggregate":
            group = filter_range(group, spec.manipulation.range)
            if not group:
                warnings.append(f"no values in range: {target_id}")
                continue
        try:
            value = aggregate([r.value_numeric for r in group], spec.manipulation.agg_fn)
        except EmptyAggregation:
            warnings.append(f"empty match group: {target_id}")
            continue
        if target_kind == "event":
            event_writes.append((target_id, value))
        else:
            object_groups.append(
                (target_id, [(value, None)], max(r.result_time for r in group)))

    # settle the column's value type, then final cell representations
    if kind == "raw":
        flat = []
        multi = False
        for _, value in event_writes:
            if isinstance(value, list):
                multi = True
                flat.extend(value)
            else:
                flat.append(value)
        for _, pairs, _ in object_groups:
            flat.extend(v for v, _ in pairs)
        if multi or any(isinstance(v, str) for v in flat):
            column_vtype = "string"
        else:
            column_vtype = "float"
    else:
        column_vtype = "float"

    def render(value):
        if column_vtype == "string":
            if isinstance(value, list):
                return json.dumps(value)
            if isinstance(value, str):
                return value
            return repr(float(value))
        return float(value)

    event_writes = [(tid, render(v)) for tid, v in event_writes]
    object_rows: list = []
    values_preview: list = []
    if spec.pattern == "event_attribute":
        values_preview = list(event_writes)
    else:
        for target_id, pairs, group_time in object_groups:
            for value, own_time in pairs:
                cell = render(value)
                object_rows.append(
                    (target_id, cell, own_time if own_time is not None else group_time))
                values_preview.append((target_id, cell))

    group_sizes = [(tid, len(idx)) for tid, idx in matches.items()]
    return {
        "match_groups": group_sizes,
        "unmatched_target_count": sum(1 for _, n in group_sizes if n == 0),
        "unmatched_reading_count": len(relevant) - len(matched_idx),
        "values": values_preview,
        "warnings": warnings,
        "event_writes": event_writes,
        "object_rows": object_rows,
        "column_vtype": column_vtype,
        "matched_devices": sorted({d for _, d in device_links}),
        "device_links": device_links,
    }
