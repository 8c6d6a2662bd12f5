"""Exception taxonomy shared by the engine, the CLI, and the HTTP API.

Every error carries a stable machine ``code`` so the CLI can map it to an
exit code and the API to an HTTP status without string matching.
"""

from __future__ import annotations


class OcelBridgeError(Exception):
    """Base class for all toolkit errors."""

    code = "error"

    def __init__(self, message: str, *, field_path: str | None = None):
        super().__init__(message)
        self.field_path = field_path


class SchemaError(OcelBridgeError):
    """A store is missing a mandatory table or has an unusable layout."""

    code = "schema"

    def __init__(self, message: str, *, table: str | None = None):
        super().__init__(message)
        self.table = table


class IntegrityError(OcelBridgeError):
    """Dangling references, duplicate ids, or invalid addition sets."""

    code = "integrity"

    def __init__(self, message: str, *, rows: list | None = None):
        super().__init__(message)
        self.rows = rows or []


class MigrationConflict(OcelBridgeError):
    """An addition clashes with the store's current schema."""

    code = "migration_conflict"


class NotFound(OcelBridgeError):
    """A referenced activity, object type, workspace, or resource is absent."""

    code = "not_found"


class SpecError(OcelBridgeError):
    """An integration spec or mapping document violates its invariants."""

    code = "spec"


class RangeError(SpecError):
    """A value range has lower > upper."""

    code = "range"


class CollisionError(OcelBridgeError):
    """An attribute name already exists on the target type."""

    code = "collision"


class TypeMismatch(OcelBridgeError):
    code = "type_mismatch"


class EmptyAggregation(OcelBridgeError):
    code = "empty_aggregation"


class CorrelationError(OcelBridgeError):
    code = "correlation"


class MappingError(OcelBridgeError):
    code = "mapping"


class PlanInvalidated(OcelBridgeError):
    """The log or readings changed since the plan was computed."""

    code = "plan_invalidated"


class ParamError(OcelBridgeError):
    code = "param"


class UploadError(OcelBridgeError):
    code = "upload"


class HashMismatch(OcelBridgeError):
    code = "hash_mismatch"


class ColumnarError(OcelBridgeError):
    code = "columnar"


class IoError(OcelBridgeError):
    code = "io"


class LeaseHeld(OcelBridgeError):
    """A writer lease on the store is currently held by someone else."""

    code = "lease_held"
