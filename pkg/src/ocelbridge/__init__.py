"""Bring sensor readings into OCEL 2.0 object-centric event logs.

Normalizes raw tabular sensor/actuator exports against a small device
schema, explores OCEL 2.0 stores, and enriches them additively with
correlated, optionally aggregated readings.
"""

__version__ = "0.1.0"
