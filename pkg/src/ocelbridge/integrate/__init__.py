from .correlate import correlate
from .engine import (
    RAW_MULTI_WARNING,
    EnrichmentPlan,
    EnrichmentReport,
    execute,
    plan,
    readings_fingerprint,
)
from .manipulate import aggregate, filter_range
from .spec import (
    AGG_FNS,
    MANIPULATION_KINDS,
    MODES,
    PATTERNS,
    CorrelationRule,
    IntegrationSpec,
    Manipulation,
    ValueRange,
    parse_spec,
)

__all__ = [
    "correlate",
    "RAW_MULTI_WARNING",
    "EnrichmentPlan",
    "EnrichmentReport",
    "execute",
    "plan",
    "readings_fingerprint",
    "aggregate",
    "filter_range",
    "AGG_FNS",
    "MANIPULATION_KINDS",
    "MODES",
    "PATTERNS",
    "CorrelationRule",
    "IntegrationSpec",
    "Manipulation",
    "ValueRange",
    "parse_spec",
]
