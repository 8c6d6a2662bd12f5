"""JSON payload shapes shared by the CLI (--json) and the HTTP API.

Parity between the two frontends is a contract: both must emit these
exact structures, so every serializer lives here and nowhere else.
"""

from __future__ import annotations

from datetime import datetime

from .errors import OcelBridgeError
from .integrate.engine import EnrichmentPlan, EnrichmentReport
from .integrate.spec import parse_spec
from .timeutil import format_timestamp

# HTTP status per machine error code; the CLI derives exit codes from the
# same table so one error class never diverges between frontends.
HTTP_STATUS = {
    "not_found": 404,
    "collision": 409,
    "migration_conflict": 409,
    "plan_invalidated": 409,
    "lease_held": 423,
    "schema": 422,
    "integrity": 422,
    "spec": 422,
    "range": 422,
    "type_mismatch": 422,
    "empty_aggregation": 422,
    "correlation": 422,
    "mapping": 422,
    "param": 422,
    "upload": 422,
    "columnar": 422,
    "hash_mismatch": 409,
    "io": 400,
    "error": 500,
}

EXIT_CODES = {
    "not_found": 3,
    "schema": 4,
    "integrity": 5,
    "mapping": 6,
    "spec": 7,
    "range": 7,
    "collision": 8,
    "migration_conflict": 9,
    "correlation": 10,
    "type_mismatch": 11,
    "empty_aggregation": 12,
    "plan_invalidated": 13,
    "lease_held": 14,
    "upload": 15,
    "hash_mismatch": 16,
    "columnar": 17,
    "param": 18,
    "io": 19,
    "error": 1,
}


def encode_value(value):
    if isinstance(value, datetime):
        return format_timestamp(value)
    return value


def error_payload(exc: OcelBridgeError) -> dict:
    return {
        "error": {
            "code": exc.code,
            "message": str(exc),
            "field_path": getattr(exc, "field_path", None),
        }
    }


def stats_payload(stats) -> dict:
    return {
        "event_count": stats.event_count,
        "object_count": stats.object_count,
        "activity_count": stats.activity_count,
        "object_type_count": stats.object_type_count,
        "e2o_count": stats.e2o_count,
        "o2o_count": stats.o2o_count,
        "per_activity_counts": dict(sorted(stats.per_activity_counts.items())),
        "per_object_type_counts": dict(sorted(stats.per_object_type_counts.items())),
    }


def dfg_payload(object_type: str, edges) -> dict:
    return {
        "object_type": object_type,
        "edges": [{"source": e.source, "target": e.target, "count": e.count}
                  for e in edges],
    }


def summary_payload(summary) -> dict:
    return {
        "reading_count": summary.reading_count,
        "devices": [
            {
                "device_id": d.device_id,
                "device_type": d.device_type,
                "device_kind": d.device_kind,
                "location": d.location,
                "reading_count": d.reading_count,
                "first_time": format_timestamp(d.first_time),
                "last_time": format_timestamp(d.last_time),
                "properties": [
                    {
                        "name": p.name,
                        "unit": p.unit,
                        "value_kind": p.value_kind,
                        "reading_count": p.reading_count,
                        "numeric_min": p.numeric_min,
                        "numeric_max": p.numeric_max,
                    }
                    for p in d.properties
                ],
            }
            for d in summary.devices
        ],
        "conflicts": list(summary.conflicts),
        "notes": list(summary.notes),
    }


def mapping_payload(suggestion) -> dict:
    return {
        "mapping": suggestion.mapping.to_dict(),
        "unresolved": list(suggestion.unresolved),
        "notes": list(suggestion.notes),
    }


def reject_payload(reject) -> dict:
    return {"source_row": reject.source_row, "reason": reject.reason,
            "detail": reject.detail}


def plan_payload(plan_id: str, pln: EnrichmentPlan) -> dict:
    return {
        "plan_id": plan_id,
        "spec": pln.spec.to_dict(),
        "match_groups": [[tid, count] for tid, count in pln.match_groups],
        "unmatched_target_count": pln.unmatched_target_count,
        "unmatched_reading_count": pln.unmatched_reading_count,
        "preview_values": [[tid, encode_value(v)] for tid, v in pln.preview_values],
        "warnings": list(pln.warnings),
        "log_fingerprint": pln.log_fingerprint,
        "readings_fingerprint": pln.readings_fingerprint,
    }


def plan_from_payload(payload: dict) -> tuple:
    """Rebuild (plan_id, EnrichmentPlan) from a persisted plan document."""
    pln = EnrichmentPlan(
        spec=parse_spec(payload["spec"]),
        match_groups=tuple((tid, count) for tid, count in payload["match_groups"]),
        unmatched_target_count=payload["unmatched_target_count"],
        unmatched_reading_count=payload["unmatched_reading_count"],
        preview_values=tuple((tid, v) for tid, v in payload["preview_values"]),
        warnings=tuple(payload["warnings"]),
        log_fingerprint=payload["log_fingerprint"],
        readings_fingerprint=payload["readings_fingerprint"],
    )
    return payload["plan_id"], pln


def report_payload(report: EnrichmentReport) -> dict:
    return {
        "columns_added": report.columns_added,
        "attribute_writes": report.attribute_writes,
        "objects_added": report.objects_added,
        "e2o_added": report.e2o_added,
        "o2o_added": report.o2o_added,
        "warnings": list(report.warnings),
    }


def job_payload(record) -> dict:
    return record.to_dict()
