"""
Domain types and serialized schemas.

Internal domain objects are frozen dataclasses; everything written to disk or
read from a user-supplied document is a Pydantic model.
"""

from .events import (
    Event,
    EventLog,
    Operator,
    Predicate,
    Scalar,
    SplitRule,
    Trace,
    VariantSplit,
)

__all__ = [
    "Event",
    "EventLog",
    "Operator",
    "Predicate",
    "Scalar",
    "SplitRule",
    "Trace",
    "VariantSplit",
]
