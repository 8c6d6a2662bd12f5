"""Canonical reading records and the raw tabular input they come from.

A normalized reading is one observation or actuation: who measured
(device), what (property + unit), the result (numeric or text, never
both), when (UTC, millisecond), and optional anchors back into a log
(object_ref / event_ref) plus a location.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from ..timeutil import epoch_ms, from_epoch_ms

REASON_MISSING_FIELD = "missing-required-field"
REASON_BAD_TIMESTAMP = "unparseable-timestamp"
REASON_BAD_NUMBER = "unparseable-number"

REJECT_REASONS = (REASON_MISSING_FIELD, REASON_BAD_TIMESTAMP, REASON_BAD_NUMBER)

# fixed column order of the columnar intermediate
READING_COLUMNS = (
    "device_id",
    "device_type",
    "device_kind",
    "property",
    "unit",
    "value_numeric",
    "value_text",
    "result_time_utc_ms",
    "location",
    "object_ref",
    "event_ref",
    "source_row",
)


@dataclass(frozen=True)
class NormalizedReading:
    device_id: str
    property: str
    result_time: datetime
    value_numeric: float | None = None
    value_text: str | None = None
    device_type: str = "unknown"
    device_kind: str = "sensor"
    unit: str | None = None
    location: str | None = None
    object_ref: str | None = None
    event_ref: str | None = None
    source_row: int = 0

    def __post_init__(self):
        if (self.value_numeric is None) == (self.value_text is None):
            raise ValueError("exactly one of value_numeric / value_text must be set")


@dataclass(frozen=True)
class Reject:
    source_row: int
    reason: str
    detail: str


@dataclass(frozen=True)
class Table:
    """Header row plus data rows, all cells as strings (or None)."""

    columns: tuple
    rows: tuple

    def __post_init__(self):
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, header has {width}")

    @classmethod
    def from_rows(cls, columns, rows) -> "Table":
        return cls(columns=tuple(columns), rows=tuple(tuple(r) for r in rows))

    @classmethod
    def from_csv_text(cls, text: str) -> "Table":
        reader = csv.reader(io.StringIO(text))
        rows = [row for row in reader]
        if not rows:
            return cls(columns=(), rows=())
        header = tuple(rows[0])
        width = len(header)
        data = []
        for row in rows[1:]:
            # ragged CSV rows are padded / truncated to header width
            if len(row) < width:
                row = row + [""] * (width - len(row))
            data.append(tuple(row[:width]))
        return cls(columns=header, rows=tuple(data))

    @classmethod
    def from_csv_path(cls, path) -> "Table":
        return cls.from_csv_text(Path(path).read_text(encoding="utf-8"))

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow(["" if c is None else c for c in row])
        return buf.getvalue()

    def column_values(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def reading_to_row(reading: NormalizedReading) -> dict:
    """Flatten a reading into the columnar intermediate's column dict."""
    return {
        "device_id": reading.device_id,
        "device_type": reading.device_type,
        "device_kind": reading.device_kind,
        "property": reading.property,
        "unit": reading.unit,
        "value_numeric": reading.value_numeric,
        "value_text": reading.value_text,
        "result_time_utc_ms": epoch_ms(reading.result_time),
        "location": reading.location,
        "object_ref": reading.object_ref,
        "event_ref": reading.event_ref,
        "source_row": reading.source_row,
    }


def reading_from_row(row: dict) -> NormalizedReading:
    return NormalizedReading(
        device_id=row["device_id"],
        device_type=row["device_type"],
        device_kind=row["device_kind"],
        property=row["property"],
        unit=row["unit"],
        value_numeric=row["value_numeric"],
        value_text=row["value_text"],
        result_time=from_epoch_ms(row["result_time_utc_ms"]),
        location=row["location"],
        object_ref=row["object_ref"],
        event_ref=row["event_ref"],
        source_row=row["source_row"],
    )
