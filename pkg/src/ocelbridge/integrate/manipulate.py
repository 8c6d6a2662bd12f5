"""Per-group value computation: range filtering and aggregation."""

from __future__ import annotations

import math

from ..errors import EmptyAggregation, TypeMismatch
from .spec import AGG_FNS, ValueRange


def filter_range(readings, rng: ValueRange):
    """Readings whose numeric value lies inside the inclusive range."""
    out = []
    for r in readings:
        if r.value_numeric is None:
            raise TypeMismatch(
                f"range filter needs numeric values; {r.property!r} reading "
                f"at row {r.source_row} is text")
        if rng.contains(r.value_numeric):
            out.append(r)
    return out


def aggregate(values, fn: str) -> float:
    """min/max/average/median of a non-empty list of finite numbers."""
    if fn not in AGG_FNS:
        raise TypeMismatch(f"unknown aggregation function: {fn!r}")
    values = list(values)
    if not values:
        raise EmptyAggregation("aggregate over empty value list")
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise TypeMismatch(f"aggregate needs finite numbers, got {v!r}")
    if fn == "min":
        return float(min(values))
    if fn == "max":
        return float(max(values))
    if fn == "average":
        return float(sum(values)) / len(values)
    srt = sorted(values)
    mid = len(srt) // 2
    if len(srt) % 2:
        return float(srt[mid])
    return (srt[mid - 1] + srt[mid]) / 2.0
