"""Declarative integration specs: what attaches where, and how.

One spec covers one device type. It names the target (an activity or an
object type), the new attribute, a correlation rule joining readings to
targets, and a manipulation turning each match group into values.

The JSON shape accepted by ``parse_spec`` is shared verbatim by the CLI
and the HTTP API; validation errors carry dotted field paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import RangeError, SpecError

PATTERNS = ("event_attribute", "object_attribute")
MODES = ("explicit_event_key", "explicit_object_key", "time_window", "lifecycle_span")
AGG_FNS = ("min", "max", "average", "median")
MANIPULATION_KINDS = ("aggregate", "filter_then_aggregate", "raw")

_RESERVED_ATTRS = ("ocel_id", "ocel_time", "ocel_changed_field")


@dataclass(frozen=True)
class ValueRange:
    """Inclusive numeric interval; an open end is represented by None."""

    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        for name, bound in (("lower", self.lower), ("upper", self.upper)):
            if bound is not None and not math.isfinite(bound):
                raise RangeError(f"range.{name} must be finite or null",
                                 field_path=f"manipulation.range.{name}")
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise RangeError("range.lower must be <= range.upper",
                             field_path="manipulation.range")

    def contains(self, value: float) -> bool:
        if self.lower is not None and value < self.lower:
            return False
        if self.upper is not None and value > self.upper:
            return False
        return True


@dataclass(frozen=True)
class Manipulation:
    kind: str
    agg_fn: str | None = None
    range: ValueRange | None = None

    def __post_init__(self):
        if self.kind not in MANIPULATION_KINDS:
            raise SpecError(f"manipulation.kind must be one of {MANIPULATION_KINDS}",
                            field_path="manipulation.kind")
        if self.kind == "raw":
            if self.agg_fn is not None:
                raise SpecError("raw manipulation takes no agg_fn",
                                field_path="manipulation.agg_fn")
            if self.range is not None:
                raise SpecError("raw manipulation takes no range",
                                field_path="manipulation.range")
            return
        if self.agg_fn not in AGG_FNS:
            raise SpecError(f"manipulation.agg_fn must be one of {AGG_FNS}",
                            field_path="manipulation.agg_fn")
        if self.kind == "filter_then_aggregate" and self.range is None:
            raise SpecError("filter_then_aggregate requires manipulation.range",
                            field_path="manipulation.range")
        if self.kind == "aggregate" and self.range is not None:
            raise SpecError("plain aggregate takes no range; "
                            "use filter_then_aggregate",
                            field_path="manipulation.range")


@dataclass(frozen=True)
class CorrelationRule:
    mode: str
    window_before_s: float | None = None
    window_after_s: float | None = None
    object_type_scope: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise SpecError(f"correlation.mode must be one of {MODES}",
                            field_path="correlation.mode")
        if self.mode == "time_window":
            for name, value in (("window_before_s", self.window_before_s),
                                ("window_after_s", self.window_after_s)):
                if value is None:
                    raise SpecError(f"time_window requires correlation.{name}",
                                    field_path=f"correlation.{name}")
                if not (isinstance(value, (int, float)) and not isinstance(value, bool)
                        and math.isfinite(value) and value >= 0):
                    raise SpecError(f"correlation.{name} must be a number >= 0",
                                    field_path=f"correlation.{name}")
        else:
            if self.window_before_s is not None or self.window_after_s is not None:
                raise SpecError("window durations are only valid for time_window",
                                field_path="correlation.window_before_s")


@dataclass(frozen=True)
class IntegrationSpec:
    device_type: str
    pattern: str
    target: str
    attribute_name: str
    correlation: CorrelationRule
    manipulation: Manipulation
    qualifier: str = "derived-from"
    materialize_devices: bool = True

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise SpecError(f"pattern must be one of {PATTERNS}", field_path="pattern")
        if not self.device_type or not isinstance(self.device_type, str):
            raise SpecError("device_type must be a non-empty string",
                            field_path="device_type")
        if not self.target or not isinstance(self.target, str):
            raise SpecError("target must be a non-empty string", field_path="target")
        if (not self.attribute_name or not isinstance(self.attribute_name, str)
                or self.attribute_name in _RESERVED_ATTRS):
            raise SpecError("attribute_name must be non-empty and not reserved",
                            field_path="attribute_name")
        if self.materialize_devices and not self.qualifier:
            raise SpecError("qualifier must be non-empty when materialize_devices is set",
                            field_path="qualifier")

    def to_dict(self) -> dict:
        rng = self.manipulation.range
        return {
            "device_type": self.device_type,
            "pattern": self.pattern,
            "target": self.target,
            "attribute_name": self.attribute_name,
            "correlation": {
                "mode": self.correlation.mode,
                "window_before_s": self.correlation.window_before_s,
                "window_after_s": self.correlation.window_after_s,
                "object_type_scope": self.correlation.object_type_scope,
            },
            "manipulation": {
                "kind": self.manipulation.kind,
                "agg_fn": self.manipulation.agg_fn,
                "range": None if rng is None else {"lower": rng.lower, "upper": rng.upper},
            },
            "qualifier": self.qualifier,
            "materialize_devices": self.materialize_devices,
        }


def _require(data: dict, key: str, path: str):
    if key not in data or data[key] is None:
        raise SpecError(f"missing required field: {path}", field_path=path)
    return data[key]


def _check_keys(data: dict, allowed, path: str):
    if not isinstance(data, dict):
        raise SpecError(f"{path or 'spec'} must be an object", field_path=path or ".")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        prefix = f"{path}." if path else ""
        raise SpecError(f"unknown field: {prefix}{unknown[0]}",
                        field_path=f"{prefix}{unknown[0]}")


def _number_or_none(value, path: str):
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(f"{path} must be a number or null", field_path=path)
    return float(value)


def parse_spec(data: dict) -> IntegrationSpec:
    """Parse and validate the shared JSON spec shape."""
    _check_keys(data, ("device_type", "pattern", "target", "attribute_name",
                       "correlation", "manipulation", "qualifier",
                       "materialize_devices"), "")

    corr_data = _require(data, "correlation", "correlation")
    _check_keys(corr_data, ("mode", "window_before_s", "window_after_s",
                            "object_type_scope"), "correlation")
    correlation = CorrelationRule(
        mode=_require(corr_data, "mode", "correlation.mode"),
        window_before_s=_number_or_none(
            corr_data.get("window_before_s"), "correlation.window_before_s"),
        window_after_s=_number_or_none(
            corr_data.get("window_after_s"), "correlation.window_after_s"),
        object_type_scope=corr_data.get("object_type_scope"),
    )

    man_data = _require(data, "manipulation", "manipulation")
    _check_keys(man_data, ("kind", "agg_fn", "range"), "manipulation")
    rng_data = man_data.get("range")
    rng = None
    if rng_data is not None:
        _check_keys(rng_data, ("lower", "upper"), "manipulation.range")
        rng = ValueRange(
            lower=_number_or_none(rng_data.get("lower"), "manipulation.range.lower"),
            upper=_number_or_none(rng_data.get("upper"), "manipulation.range.upper"),
        )
    manipulation = Manipulation(
        kind=_require(man_data, "kind", "manipulation.kind"),
        agg_fn=man_data.get("agg_fn"),
        range=rng,
    )

    materialize = data.get("materialize_devices", True)
    if not isinstance(materialize, bool):
        raise SpecError("materialize_devices must be a boolean",
                        field_path="materialize_devices")
    qualifier = data.get("qualifier", "derived-from")
    if not isinstance(qualifier, str):
        raise SpecError("qualifier must be a string", field_path="qualifier")

    return IntegrationSpec(
        device_type=_require(data, "device_type", "device_type"),
        pattern=_require(data, "pattern", "pattern"),
        target=_require(data, "target", "target"),
        attribute_name=_require(data, "attribute_name", "attribute_name"),
        correlation=correlation,
        manipulation=manipulation,
        qualifier=qualifier,
        materialize_devices=materialize,
    )
