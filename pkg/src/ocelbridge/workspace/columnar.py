"""Parquet-backed columnar intermediates for the adjusted/processed stages."""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

import pyarrow as pa
import pyarrow.parquet as pq

from ..errors import ColumnarError, ParamError

DTYPES = {
    "string": pa.string(),
    "int64": pa.int64(),
    "float64": pa.float64(),
    "bool": pa.bool_(),
    "timestamp_ms": pa.timestamp("ms", tz="UTC"),
}

_STAGES = ("adjusted", "processed")


def _kind_of(value) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int64"
    if isinstance(value, float):
        return "float64"
    if isinstance(value, str):
        return "string"
    if isinstance(value, datetime):
        return "timestamp_ms"
    return "unsupported"


def _infer_dtype(column: str, values) -> str:
    kinds = set()
    for v in values:
        if v is None:
            continue
        kind = _kind_of(v)
        if kind == "unsupported":
            raise ColumnarError(f"column {column!r} holds unsupported value {v!r}")
        kinds.add(kind)
    if not kinds:
        raise ColumnarError(
            f"column {column!r} is entirely null; declare its type explicitly")
    if kinds == {"int64", "float64"}:
        return "float64"  # widen rather than truncate
    if len(kinds) > 1:
        raise ColumnarError(f"column {column!r} mixes types {sorted(kinds)}")
    return kinds.pop()


def _check_fits(column: str, values, dtype: str) -> None:
    # pyarrow would cast 2.5 into an int64 column without complaint
    allowed = {dtype} | ({"int64"} if dtype == "float64" else set())
    for v in values:
        if v is None:
            continue
        if _kind_of(v) not in allowed:
            raise ColumnarError(
                f"column {column!r} value {v!r} does not fit type {dtype}")


def store_columnar(ws, stage: str, name: str, rows, schema: dict | None = None) -> Path:
    """Write dict-rows as one parquet file; returns its path.

    ``schema`` maps column name to one of DTYPES; without it, types are
    inferred and every column must have at least one non-null value.
    """
    if stage not in _STAGES:
        raise ParamError(f"stage must be one of {_STAGES}: {stage!r}")
    rows = list(rows)
    if schema is None:
        if not rows:
            raise ColumnarError("empty row set needs an explicit column declaration")
        columns = list(rows[0].keys())
        schema = {c: _infer_dtype(c, [r.get(c) for r in rows]) for c in columns}
    else:
        columns = list(schema.keys())
        for dtype in schema.values():
            if dtype not in DTYPES:
                raise ColumnarError(f"unknown column type: {dtype!r}")

    arrays = []
    for column in columns:
        values = [r.get(column) for r in rows]
        _check_fits(column, values, schema[column])
        try:
            arrays.append(pa.array(values, type=DTYPES[schema[column]]))
        except (pa.ArrowInvalid, pa.ArrowTypeError) as exc:
            raise ColumnarError(
                f"column {column!r} does not fit type {schema[column]}: {exc}") from exc
    table = pa.table(dict(zip(columns, arrays)))
    target_dir = ws.adjusted if stage == "adjusted" else ws.processed
    path = target_dir / f"{name}.parquet"
    pq.write_table(table, path)
    return path


def read_columnar(path) -> tuple:
    """Read a parquet file back into (columns, dict-rows)."""
    path = Path(path)
    if not path.is_file():
        raise ColumnarError(f"no columnar file at {path}")
    table = pq.read_table(path)
    columns = list(table.column_names)
    rows = []
    raw = table.to_pylist()
    for record in raw:
        out = {}
        for column in columns:
            value = record[column]
            if isinstance(value, datetime):
                # normalize whatever tzinfo object pyarrow hands back
                value = (value.replace(tzinfo=timezone.utc) if value.tzinfo is None
                         else value.astimezone(timezone.utc))
            out[column] = value
        rows.append(out)
    return columns, rows
