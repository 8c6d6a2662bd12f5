from .mapping import (
    REQUIRED_ROLES,
    ROLES,
    ColumnMapping,
    MappingSuggestion,
    infer_mapping,
)
from .model import (
    READING_COLUMNS,
    REASON_BAD_NUMBER,
    REASON_BAD_TIMESTAMP,
    REASON_MISSING_FIELD,
    NormalizedReading,
    Reject,
    Table,
    reading_from_row,
    reading_to_row,
)
from .normalize import identity_mapping, mapping_notes, normalize, readings_to_table
from .summary import DeviceRecord, DeviceSummary, PropertyRecord, device_summary

__all__ = [
    "ROLES",
    "REQUIRED_ROLES",
    "ColumnMapping",
    "MappingSuggestion",
    "infer_mapping",
    "READING_COLUMNS",
    "REASON_MISSING_FIELD",
    "REASON_BAD_TIMESTAMP",
    "REASON_BAD_NUMBER",
    "NormalizedReading",
    "Reject",
    "Table",
    "reading_from_row",
    "reading_to_row",
    "identity_mapping",
    "mapping_notes",
    "normalize",
    "readings_to_table",
    "DeviceRecord",
    "DeviceSummary",
    "PropertyRecord",
    "device_summary",
]
