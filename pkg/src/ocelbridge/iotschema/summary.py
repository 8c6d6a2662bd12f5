"""Device-centric rollup over normalized readings."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime


@dataclass(frozen=True)
class PropertyRecord:
    name: str
    unit: str | None
    value_kind: str  # numeric | text | mixed
    reading_count: int
    numeric_min: float | None = None
    numeric_max: float | None = None


@dataclass(frozen=True)
class DeviceRecord:
    device_id: str
    device_type: str
    device_kind: str
    location: str | None
    properties: tuple
    reading_count: int
    first_time: datetime
    last_time: datetime


@dataclass(frozen=True)
class DeviceSummary:
    devices: tuple
    reading_count: int
    conflicts: tuple  # inconsistencies observed across readings of one device
    notes: tuple  # defaults the mapping applied


def device_summary(readings, notes=()) -> DeviceSummary:
    by_device: dict = {}
    for r in readings:
        by_device.setdefault(r.device_id, []).append(r)

    conflicts: list = []
    devices: list = []
    for device_id in sorted(by_device):
        rs = by_device[device_id]
        types = sorted({r.device_type for r in rs})
        kinds = sorted({r.device_kind for r in rs})
        locations = sorted({r.location for r in rs if r.location})
        if len(types) > 1:
            conflicts.append(f"device {device_id!r} reported types {types}")
        if len(kinds) > 1:
            conflicts.append(f"device {device_id!r} reported kinds {kinds}")
        for kind in kinds:
            if kind not in ("sensor", "actuator"):
                conflicts.append(f"device {device_id!r} has unknown kind {kind!r}")

        by_prop: dict = {}
        for r in rs:
            by_prop.setdefault(r.property, []).append(r)
        props = []
        for name in sorted(by_prop):
            prs = by_prop[name]
            units = sorted({r.unit for r in prs if r.unit})
            if len(units) > 1:
                conflicts.append(
                    f"device {device_id!r} property {name!r} mixes units {units}")
            numeric = [r.value_numeric for r in prs if r.value_numeric is not None]
            if len(numeric) == len(prs):
                value_kind = "numeric"
            elif numeric:
                value_kind = "mixed"
            else:
                value_kind = "text"
            props.append(PropertyRecord(
                name=name, unit=units[0] if units else None,
                value_kind=value_kind, reading_count=len(prs),
                numeric_min=min(numeric) if numeric else None,
                numeric_max=max(numeric) if numeric else None))

        times = [r.result_time for r in rs]
        devices.append(DeviceRecord(
            device_id=device_id,
            device_type=types[0],
            device_kind=kinds[0],
            location=locations[0] if locations else None,
            properties=tuple(props),
            reading_count=len(rs),
            first_time=min(times),
            last_time=max(times)))

    return DeviceSummary(
        devices=tuple(devices),
        reading_count=sum(len(v) for v in by_device.values()),
        conflicts=tuple(conflicts),
        notes=tuple(notes))
