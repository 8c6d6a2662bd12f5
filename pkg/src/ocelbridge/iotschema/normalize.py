"""Turn raw tables into canonical readings, one verdict per input row.

Every input row ends up either as a reading or as a reject carrying one
of three reason codes; nothing is silently dropped.
"""

from __future__ import annotations

import math

from ..timeutil import format_timestamp, parse_timestamp
from .mapping import REQUIRED_ROLES, ColumnMapping
from .model import (
    REASON_BAD_NUMBER,
    REASON_BAD_TIMESTAMP,
    REASON_MISSING_FIELD,
    NormalizedReading,
    Reject,
    Table,
)


def normalize(table: Table, mapping: ColumnMapping) -> tuple:
    """Apply a mapping to a table; returns ``(readings, rejects)``.

    len(table.rows) == len(readings) + len(rejects) always holds.
    """
    mapping.validate(table)
    col_idx = {role: table.columns.index(header)
               for role, header in mapping.columns.items()}

    readings: list = []
    rejects: list = []
    for row_no, row in enumerate(table.rows):
        def get(role: str) -> str:
            if role in col_idx:
                cell = row[col_idx[role]]
                return "" if cell is None else str(cell).strip()
            if role in mapping.constants:
                return str(mapping.constants[role]).strip()
            return ""

        missing = [role for role in REQUIRED_ROLES if not get(role)]
        if missing:
            rejects.append(Reject(
                source_row=row_no, reason=REASON_MISSING_FIELD,
                detail=f"required field empty: {missing[0]}"))
            continue

        raw_time = get("result_time")
        try:
            time = parse_timestamp(raw_time, mapping.timestamp_format)
        except ValueError:
            rejects.append(Reject(
                source_row=row_no, reason=REASON_BAD_TIMESTAMP,
                detail=f"cannot parse timestamp: {raw_time!r}"))
            continue

        prop = get("property")
        raw_value = get("result")
        kind = mapping.value_types.get(prop)
        value_numeric = value_text = None
        if kind == "text":
            value_text = raw_value
        else:
            try:
                number = float(raw_value)
                if not math.isfinite(number):
                    raise ValueError(raw_value)
                value_numeric = number
            except ValueError:
                if kind == "numeric":
                    rejects.append(Reject(
                        source_row=row_no, reason=REASON_BAD_NUMBER,
                        detail=f"cannot parse number for {prop!r}: {raw_value!r}"))
                    continue
                value_text = raw_value  # no declared kind: fall back to text

        kind_raw = get("device_kind").lower()
        device_kind = kind_raw if kind_raw else "sensor"

        location = get("location")
        if not location:
            parts = [get("platform"), get("deployment")]
            location = "/".join(p for p in parts if p)

        readings.append(NormalizedReading(
            device_id=get("device_id"),
            device_type=get("device_type") or "unknown",
            device_kind=device_kind,
            property=prop,
            unit=get("unit") or None,
            value_numeric=value_numeric,
            value_text=value_text,
            result_time=time,
            location=location or None,
            object_ref=get("object_ref") or None,
            event_ref=get("event_ref") or None,
            source_row=row_no,
        ))
    return readings, rejects


def mapping_notes(mapping: ColumnMapping) -> list:
    """Human-readable notes on defaults this mapping will trigger."""
    notes = []
    bound = set(mapping.columns) | set(mapping.constants)
    if "device_kind" not in mapping.columns:
        notes.append("device_kind defaulted to 'sensor'")
    if "location" not in bound and ("platform" in bound or "deployment" in bound):
        merged = [r for r in ("platform", "deployment") if r in bound]
        notes.append("location derived from " + "/".join(merged))
    if "device_type" not in bound:
        notes.append("device_type defaulted to 'unknown'")
    return notes


_IDENTITY_HEADERS = (
    "device_id", "device_type", "device_kind", "property", "unit",
    "result", "result_time", "location", "object_ref", "event_ref",
)


def identity_mapping(value_types: dict | None = None) -> ColumnMapping:
    """Mapping for tables whose headers are exactly the role names."""
    return ColumnMapping(
        columns={role: role for role in _IDENTITY_HEADERS},
        value_types=dict(value_types or {}),
    )


def readings_to_table(readings) -> tuple:
    """Serialize readings into a table the identity mapping normalizes back.

    Returns ``(table, mapping)``. Value kinds are pinned per property so a
    text value that happens to look numeric survives the round trip.
    """
    kinds: dict = {}
    for r in readings:
        kind = "numeric" if r.value_numeric is not None else "text"
        if kinds.setdefault(r.property, kind) != kind:
            kinds[r.property] = None  # mixed: leave undeclared
    value_types = {p: k for p, k in kinds.items() if k is not None}

    rows = []
    for r in readings:
        result = repr(r.value_numeric) if r.value_numeric is not None else r.value_text
        rows.append((
            r.device_id, r.device_type, r.device_kind, r.property,
            r.unit or "", result, format_timestamp(r.result_time),
            r.location or "", r.object_ref or "", r.event_ref or "",
        ))
    table = Table(columns=_IDENTITY_HEADERS, rows=tuple(rows))
    return table, identity_mapping(value_types)
