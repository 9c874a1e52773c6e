"""
Domain types for event logs and process variants.

Events, traces and logs are immutable once built, so they can be shared
read-only between worker threads.
"""

import operator
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import StrEnum
from types import MappingProxyType
from typing import Any

from src.errors import ConfigurationError

Scalar = str | int | float | bool

_EMPTY: Mapping[str, Scalar] = MappingProxyType({})


@dataclass(frozen=True, eq=True)
class Event:
    """A single recorded activity execution of one case."""

    activity: str
    case_id: str
    timestamp: datetime
    attributes: Mapping[str, Scalar] = field(default=_EMPTY, compare=True)

    def __post_init__(self):
        if not self.activity:
            raise ValueError("Event activity must be non-empty")
        if not isinstance(self.timestamp, datetime):
            raise ValueError(f"Invalid timestamp {self.timestamp!r}")
        if self.timestamp.tzinfo is None:
            object.__setattr__(
                self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc)
            )
        else:
            object.__setattr__(
                self, "timestamp", self.timestamp.astimezone(timezone.utc)
            )
        object.__setattr__(self, "attributes", MappingProxyType(dict(self.attributes)))

    def __hash__(self):
        return hash((self.activity, self.case_id, self.timestamp))


@dataclass(frozen=True, eq=True)
class Trace:
    """The time-ordered, non-empty sequence of events of one case."""

    case_id: str
    events: tuple[Event, ...]
    case_attributes: Mapping[str, Scalar] = field(default=_EMPTY)

    def __post_init__(self):
        if not self.events:
            raise ValueError(f"Trace '{self.case_id}' has no events")
        for event in self.events:
            if event.case_id != self.case_id:
                raise ValueError(
                    f"Event of case '{event.case_id}' in trace '{self.case_id}'"
                )
        for previous, current in zip(self.events, self.events[1:]):
            if current.timestamp < previous.timestamp:
                raise ValueError(f"Trace '{self.case_id}' is not sorted by timestamp")
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(
            self, "case_attributes", MappingProxyType(dict(self.case_attributes))
        )

    def __hash__(self):
        return hash((self.case_id, self.activities))

    @classmethod
    def from_events(
        cls,
        case_id: str,
        events: Iterable[Event],
        case_attributes: Mapping[str, Scalar] | None = None,
    ) -> "Trace":
        """Build a trace, sorting events by timestamp (stable on file order)."""
        ordered = sorted(events, key=lambda event: event.timestamp)
        return cls(case_id, tuple(ordered), case_attributes or {})

    def __len__(self) -> int:
        return len(self.events)

    @property
    def activities(self) -> tuple[str, ...]:
        """Activity names in execution order."""
        return tuple(event.activity for event in self.events)

    def edges(self) -> Iterator[tuple[str, str]]:
        """Directly-follows pairs in order of occurrence."""
        activities = self.activities
        return zip(activities, activities[1:])

    def attribute(self, name: str) -> Scalar | None:
        """Resolve an attribute from the case first, else the first event with it."""
        if name in self.case_attributes:
            return self.case_attributes[name]
        for event in self.events:
            if name in event.attributes:
                return event.attributes[name]
        return None


@dataclass(frozen=True)
class EventLog:
    """A set of traces with unique case ids."""

    traces: tuple[Trace, ...] = ()
    alphabet: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(self.traces))
        seen: set[str] = set()
        for trace in self.traces:
            if trace.case_id in seen:
                raise ValueError(f"Duplicate case id '{trace.case_id}'")
            seen.add(trace.case_id)
        activities = {event.activity for trace in self.traces for event in trace.events}
        object.__setattr__(self, "alphabet", tuple(sorted(activities)))

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self.traces)

    @property
    def max_trace_len(self) -> int:
        """Length of the longest trace (0 for an empty log)."""
        return max((len(trace) for trace in self.traces), default=0)

    @property
    def event_count(self) -> int:
        """Total number of events."""
        return sum(len(trace) for trace in self.traces)


class Operator(StrEnum):
    """Comparison operators accepted in split rules."""

    EQ = "eq"
    NE = "ne"
    LT = "lt"
    LE = "le"
    GT = "gt"
    GE = "ge"


_COMPARATORS: dict[Operator, Callable[[Any, Any], bool]] = {
    Operator.EQ: operator.eq,
    Operator.NE: operator.ne,
    Operator.LT: operator.lt,
    Operator.LE: operator.le,
    Operator.GT: operator.gt,
    Operator.GE: operator.ge,
}

_SYMBOLS = {
    Operator.EQ: "=",
    Operator.NE: "!=",
    Operator.LT: "<",
    Operator.LE: "<=",
    Operator.GT: ">",
    Operator.GE: ">=",
}


def _as_number(value: Scalar | None) -> float | None:
    if isinstance(value, bool) or value is None:
        return None
    if isinstance(value, int | float):
        return float(value)
    try:
        return float(value)
    except ValueError:
        return None


@dataclass(frozen=True)
class Predicate:
    """A single comparison `attribute <op> value`."""

    op: Operator
    value: Scalar

    def matches(self, candidate: Scalar | None) -> bool:
        """Evaluate the predicate; numeric comparison when both sides are numbers."""
        if candidate is None:
            return False
        left, right = _as_number(candidate), _as_number(self.value)
        if left is not None and right is not None:
            return _COMPARATORS[self.op](left, right)
        if self.op in (Operator.EQ, Operator.NE):
            return _COMPARATORS[self.op](str(candidate), str(self.value))
        return False

    def describe(self, attribute: str) -> str:
        return f"{attribute} {_SYMBOLS[self.op]} {self.value}"


@dataclass(frozen=True)
class SplitRule:
    """Two mutually exclusive predicates defining variant 1 and variant 2."""

    first: Predicate
    second: Predicate

    def describe(self, attribute: str) -> str:
        return f"{self.first.describe(attribute)} | {self.second.describe(attribute)}"

    def classify(self, value: Scalar | None) -> int | None:
        """Return 1, 2 or None for a resolved attribute value."""
        in_first = self.first.matches(value)
        in_second = self.second.matches(value)
        if in_first and in_second:
            raise ConfigurationError(
                f"Split predicates are not mutually exclusive for value {value!r}"
            )
        if in_first:
            return 1
        if in_second:
            return 2
        return None


@dataclass(frozen=True)
class VariantSplit:
    """Two process variants over a shared universal alphabet."""

    variant1: EventLog
    variant2: EventLog
    predicate_description: str
    universal_alphabet: tuple[str, ...] = field(init=False)
    max_trace_len: int = field(init=False)
    dropped: int = 0
    missing_attribute: int = 0

    def __post_init__(self):
        alphabet = set(self.variant1.alphabet) | set(self.variant2.alphabet)
        object.__setattr__(self, "universal_alphabet", tuple(sorted(alphabet)))
        object.__setattr__(
            self,
            "max_trace_len",
            max(self.variant1.max_trace_len, self.variant2.max_trace_len),
        )

    def variant(self, variant_id: int) -> EventLog:
        """Return variant 1 or 2."""
        if variant_id == 1:
            return self.variant1
        if variant_id == 2:
            return self.variant2
        raise ValueError(f"variant_id must be 1 or 2, got {variant_id}")
