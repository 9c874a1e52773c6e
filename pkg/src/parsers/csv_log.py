"""
CSV event log parser and canonical CSV writer.

One row per event. The case id, activity and timestamp columns are named by a
column mapping; every other column becomes an event attribute, except columns
prefixed with `case:` which become case attributes.
"""

import io
import logging
import math
import re
from datetime import datetime, timezone
from typing import BinaryIO

import pandas as pd
from pydantic import BaseModel, Field

from src.errors import ConfigurationError, LogParseError
from src.models.events import Event, EventLog, Scalar, Trace

logger = logging.getLogger(__name__)

CASE_PREFIX = "case:"

_INT_PATTERN = re.compile(r"^[+-]?\d+$")
_BOOL_VALUES = {"true": True, "false": False}


class CsvColumnMapping(BaseModel):
    """Column mapping for CSV event logs."""

    case_column: str = Field(default="case_id", description="Case identifier column")
    activity_column: str = Field(default="activity", description="Activity column")
    timestamp_column: str = Field(default="timestamp", description="Timestamp column")
    timestamp_format: str | None = Field(
        default=None,
        description="strftime-style format; ISO-8601 when unset",
    )
    delimiter: str = Field(default=",", description="Field delimiter")


def coerce_scalar(raw: str) -> Scalar | None:
    """Parse numeric-looking and boolean values; empty strings mean 'absent'."""
    if raw == "":
        return None
    text = raw.strip()
    if _INT_PATTERN.match(text):
        return int(text)
    lowered = text.lower()
    if lowered in _BOOL_VALUES:
        return _BOOL_VALUES[lowered]
    try:
        value = float(text)
    except ValueError:
        return raw
    return value if math.isfinite(value) else raw


def _format_scalar(value: Scalar) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _format_timestamp(instant: datetime) -> str:
    return instant.astimezone(timezone.utc).isoformat()


def parse_csv(stream: BinaryIO | bytes, mapping: CsvColumnMapping) -> EventLog:
    """
    Parse a CSV event log.

    Args:
        stream: Binary stream (or bytes) with a header row
        mapping: Column mapping and timestamp format

    Returns:
        EventLog with traces in order of first appearance, events sorted by
        timestamp (ties keep file order)

    Raises:
        ConfigurationError: A mapped column is missing from the header
        LogParseError: Unparseable timestamp (with row number) or no traces
    """
    if isinstance(stream, bytes | bytearray):
        stream = io.BytesIO(stream)

    try:
        frame = pd.read_csv(
            stream,
            sep=mapping.delimiter,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=False,
        )
    except pd.errors.EmptyDataError:
        raise LogParseError("no traces")
    except pd.errors.ParserError as e:
        raise LogParseError(f"Malformed CSV: {e}")

    required = [mapping.case_column, mapping.activity_column, mapping.timestamp_column]
    missing = [column for column in required if column not in frame.columns]
    if missing:
        raise ConfigurationError(
            f"Mapped column(s) missing from CSV header: {', '.join(missing)}"
        )
    if frame.empty:
        raise LogParseError("no traces")

    timestamps = pd.to_datetime(
        frame[mapping.timestamp_column],
        format=mapping.timestamp_format or "ISO8601",
        utc=True,
        errors="coerce",
    )
    invalid = timestamps.isna().to_numpy().nonzero()[0]
    if len(invalid):
        position = int(invalid[0])
        raise LogParseError(
            f"Unparseable timestamp "
            f"{frame[mapping.timestamp_column].iloc[position]!r}",
            row=position + 2,  # header is row 1
        )

    attribute_columns = [c for c in frame.columns if c not in required]
    case_columns = [c for c in attribute_columns if c.startswith(CASE_PREFIX)]
    event_columns = [c for c in attribute_columns if not c.startswith(CASE_PREFIX)]

    grouped: dict[str, list[Event]] = {}
    case_attributes: dict[str, dict[str, Scalar]] = {}

    for position, row in enumerate(frame.itertuples(index=False, name=None)):
        record = dict(zip(frame.columns, row))
        case_id = record[mapping.case_column]
        activity = record[mapping.activity_column]
        if case_id == "":
            raise LogParseError("Empty case id", row=position + 2)
        if activity == "":
            raise LogParseError("Empty activity", row=position + 2)

        attributes = {}
        for column in event_columns:
            value = coerce_scalar(record[column])
            if value is not None:
                attributes[column] = value

        if case_id not in grouped:
            grouped[case_id] = []
            case_attributes[case_id] = {}
        for column in case_columns:
            value = coerce_scalar(record[column])
            if value is not None:
                case_attributes[case_id].setdefault(column[len(CASE_PREFIX) :], value)

        grouped[case_id].append(
            Event(
                activity=activity,
                case_id=case_id,
                timestamp=timestamps.iloc[position].to_pydatetime(),
                attributes=attributes,
            )
        )

    log = EventLog(
        tuple(
            Trace.from_events(case_id, events, case_attributes[case_id])
            for case_id, events in grouped.items()
        )
    )
    logger.info(
        f"Parsed CSV log: {len(log):,} traces, {log.event_count:,} events, "
        f"{len(log.alphabet)} activities"
    )
    return log


def write_csv(log: EventLog) -> bytes:
    """
    Serialize a log to the canonical CSV layout read back by parse_csv.

    Columns: case_id, activity, timestamp, sorted event attributes, then sorted
    `case:` attributes repeated on every row of the case.

    CSV cells carry no type, so parse_csv re-coerces every value with
    coerce_scalar. The round trip is exact for logs that were themselves read
    from CSV. Logs from typed sources (XES) come back with number- or
    boolean-looking strings converted ("007" to 7, "true" to True, "1.5" to
    1.5) and empty-string attributes dropped.
    """
    event_keys = sorted({k for t in log for e in t.events for k in e.attributes})
    case_keys = sorted({k for t in log for k in t.case_attributes})
    header = (
        ["case_id", "activity", "timestamp"]
        + event_keys
        + [f"{CASE_PREFIX}{k}" for k in case_keys]
    )

    rows = []
    for trace in log:
        case_values = [
            (
                _format_scalar(trace.case_attributes[k])
                if k in trace.case_attributes
                else ""
            )
            for k in case_keys
        ]
        for event in trace.events:
            rows.append(
                [trace.case_id, event.activity, _format_timestamp(event.timestamp)]
                + [
                    _format_scalar(event.attributes[k]) if k in event.attributes else ""
                    for k in event_keys
                ]
                + case_values
            )

    buffer = io.StringIO()
    pd.DataFrame(rows, columns=header, dtype=str).to_csv(
        buffer, index=False, lineterminator="\n"
    )
    return buffer.getvalue().encode("utf-8")
