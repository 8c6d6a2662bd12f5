from .model import (
    VALUE_TYPES,
    E2ORelation,
    ExtraTable,
    O2ORelation,
    ObjectAttributeEntry,
    OcelEvent,
    OcelLog,
    OcelObject,
    infer_value_type,
)
from .stats import DfgEdge, OcelStats, directly_follows, log_statistics
from .storage import (
    AdditionSet,
    ApplyReceipt,
    apply_additions,
    load_ocel,
    table_snapshot,
    write_ocel,
)
from .validate import Violation, validate_ocel

__all__ = [
    "VALUE_TYPES",
    "E2ORelation",
    "ExtraTable",
    "O2ORelation",
    "ObjectAttributeEntry",
    "OcelEvent",
    "OcelLog",
    "OcelObject",
    "infer_value_type",
    "DfgEdge",
    "OcelStats",
    "directly_follows",
    "log_statistics",
    "AdditionSet",
    "ApplyReceipt",
    "apply_additions",
    "load_ocel",
    "table_snapshot",
    "write_ocel",
    "Violation",
    "validate_ocel",
]
