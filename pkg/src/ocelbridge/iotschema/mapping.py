"""Column-role mapping between raw sensor exports and the canonical schema.

Roles name the slots of the canonical reading record. A mapping binds each
role to a source column (or a constant), and optionally pins a timestamp
format and per-property value kinds. ``infer_mapping`` guesses a mapping
from header names and cell contents; callers can amend it before running
the normalizer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import MappingError
from .model import Table

ROLES = (
    "device_id",
    "device_type",
    "device_kind",
    "property",
    "unit",
    "result",
    "result_time",
    "location",
    "platform",
    "deployment",
    "object_ref",
    "event_ref",
)

REQUIRED_ROLES = ("device_id", "property", "result", "result_time")

VALUE_KINDS = ("numeric", "text")

# normalized header -> role; first listed synonym wins when several match
SYNONYMS = {
    "device_id": (
        "deviceid", "sensorid", "device", "sensor", "meterid", "sourceid",
        "nodeid", "stationid", "assetdevice", "madeby",
    ),
    "device_type": ("devicetype", "sensortype", "devicemodel", "model", "type"),
    "device_kind": ("devicekind", "kind", "deviceclass", "actuatorflag"),
    "property": (
        "property", "observedproperty", "observableproperty", "measurement",
        "metric", "parameter", "channel", "quantity", "variable",
    ),
    "unit": ("unit", "uom", "units", "unitofmeasure", "unitofmeasurement"),
    "result": (
        "value", "result", "reading", "measurementvalue", "observedvalue",
        "observation", "simpleresult", "val",
    ),
    "result_time": (
        "timestamp", "time", "resulttime", "datetime", "date", "observedat",
        "recordedat", "eventtime", "ts", "measuredat", "phenomenontime",
    ),
    "location": ("location", "site", "position", "place", "geo", "area", "zone"),
    "platform": ("platform", "station", "hostplatform", "carrier"),
    "deployment": ("deployment", "installation", "deployedon"),
    "object_ref": (
        "objectid", "object", "objectref", "assetid", "entityid", "relatedobject",
    ),
    "event_ref": ("eventid", "event", "eventref", "relatedevent"),
}


def _norm_header(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", (name or "").lower())


@dataclass
class ColumnMapping:
    """Binds canonical roles to source columns and constants."""

    columns: dict = field(default_factory=dict)  # role -> source header
    constants: dict = field(default_factory=dict)  # role -> fixed value
    timestamp_format: str | None = None
    value_types: dict = field(default_factory=dict)  # property name -> numeric|text

    def validate(self, table: Table | None = None) -> None:
        for role in list(self.columns) + list(self.constants):
            if role not in ROLES:
                raise MappingError(f"unknown role: {role!r}", field_path=f"columns.{role}")
        overlap = set(self.columns) & set(self.constants)
        if overlap:
            raise MappingError(
                f"roles bound to both a column and a constant: {sorted(overlap)}")
        for role in REQUIRED_ROLES:
            if role not in self.columns and role not in self.constants:
                raise MappingError(
                    f"required role not mapped: {role}", field_path=f"columns.{role}")
        for prop, kind in self.value_types.items():
            if kind not in VALUE_KINDS:
                raise MappingError(
                    f"value kind must be one of {VALUE_KINDS}: {kind!r}",
                    field_path=f"value_types.{prop}")
        if table is not None:
            for role, header in self.columns.items():
                if header not in table.columns:
                    raise MappingError(
                        f"mapped column {header!r} not present in table",
                        field_path=f"columns.{role}")

    def to_dict(self) -> dict:
        return {
            "columns": dict(self.columns),
            "constants": dict(self.constants),
            "timestamp_format": self.timestamp_format,
            "value_types": dict(self.value_types),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ColumnMapping":
        if not isinstance(data, dict):
            raise MappingError("mapping must be an object")
        unknown = set(data) - {"columns", "constants", "timestamp_format", "value_types"}
        if unknown:
            raise MappingError(f"unknown mapping fields: {sorted(unknown)}")
        return cls(
            columns=dict(data.get("columns", {})),
            constants=dict(data.get("constants", {})),
            timestamp_format=data.get("timestamp_format"),
            value_types=dict(data.get("value_types", {})),
        )


@dataclass(frozen=True)
class MappingSuggestion:
    mapping: ColumnMapping
    unresolved: tuple  # required roles that could not be matched
    notes: tuple


def _looks_like_header(columns) -> bool:
    if not columns:
        return False
    for cell in columns:
        text = (cell or "").strip()
        if not text:
            return False
        try:
            float(text)
            return False  # numeric first row is data, not a header
        except ValueError:
            pass
    return True


def infer_mapping(table: Table) -> MappingSuggestion:
    """Guess a mapping from header synonyms and cell contents."""
    if not _looks_like_header(table.columns):
        raise MappingError("table has no usable header row")

    columns: dict = {}
    used: set = set()
    for role in ROLES:
        wanted = SYNONYMS[role]
        best = None
        for header in table.columns:
            if header in used:
                continue
            norm = _norm_header(header)
            if norm == role.replace("_", "") or norm in wanted:
                rank = 0 if norm == role.replace("_", "") else wanted.index(norm) + 1
                if best is None or rank < best[0]:
                    best = (rank, header)
        if best is not None:
            columns[role] = best[1]
            used.add(best[1])

    notes = []
    constants: dict = {}
    if "device_kind" not in columns:
        constants["device_kind"] = "sensor"
        notes.append("device_kind not present; defaulted to 'sensor'")
    if "location" not in columns and ("platform" in columns or "deployment" in columns):
        merged = [r for r in ("platform", "deployment") if r in columns]
        notes.append("location derived from " + "/".join(merged))

    value_types = {}
    if "property" in columns and "result" in columns:
        value_types = _sniff_value_kinds(table, columns["property"], columns["result"])

    unresolved = tuple(r for r in REQUIRED_ROLES if r not in columns)
    mapping = ColumnMapping(columns=columns, constants=constants, value_types=value_types)
    return MappingSuggestion(mapping=mapping, unresolved=unresolved, notes=tuple(notes))


def _sniff_value_kinds(table: Table, prop_col: str, result_col: str) -> dict:
    """Per property: 'numeric' when >= 80% of non-empty cells parse as float."""
    props = table.column_values(prop_col)
    results = table.column_values(result_col)
    counts: dict = {}
    for prop, raw in zip(props, results):
        prop = (prop or "").strip()
        raw = (raw or "").strip()
        if not prop or not raw:
            continue
        ok, total = counts.get(prop, (0, 0))
        try:
            float(raw)
            ok += 1
        except ValueError:
            pass
        counts[prop] = (ok, total + 1)
    return {
        prop: ("numeric" if ok / total >= 0.8 else "text")
        for prop, (ok, total) in counts.items()
    }
