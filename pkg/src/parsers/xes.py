"""
XES event log parser.

Reads IEEE 1849 XES documents (optionally gzip-compressed) with pm4py's
iterparse importer and maps its traces and events onto the toolkit's
EventLog/Trace/Event types.
"""

import logging
import os
import shutil
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Any, BinaryIO

from lxml import etree
from pm4py.objects.log.importer.xes import importer as xes_importer

from src.errors import LogParseError
from src.models.events import Event, EventLog, Scalar, Trace

logger = logging.getLogger(__name__)

CONCEPT_NAME = "concept:name"
TIME_TIMESTAMP = "time:timestamp"

_GZIP_MAGIC = b"\x1f\x8b"

_VARIANT = xes_importer.Variants.ITERPARSE
_IMPORT_PARAMETERS = {
    _VARIANT.value.Parameters.TIMESTAMP_SORT: False,
    _VARIANT.value.Parameters.SHOW_PROGRESS_BAR: False,
}


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 instant; naive values are taken as UTC."""
    return datetime.fromisoformat(value.strip())


def _scalar(value: Any) -> Scalar:
    """Reduce an importer attribute value to a Scalar (dates become ISO text)."""
    if isinstance(value, datetime):
        return value.isoformat()
    if isinstance(value, bool | int | float | str):
        return value
    return str(value)


def _flat_attributes(source: Any) -> dict[str, Scalar]:
    # list and container attributes arrive as nested dicts and are dropped
    return {
        key: _scalar(value)
        for key, value in dict(source).items()
        if not isinstance(value, dict)
    }


def _instant(raw: Any, position: int, trace_index: int) -> datetime:
    if isinstance(raw, datetime):
        return raw
    try:
        return parse_timestamp(str(raw))
    except ValueError:
        raise LogParseError(
            f"Event {position} has an invalid timestamp {raw!r}",
            trace_index=trace_index,
        )


def _build_trace(pm_trace: Any, trace_index: int) -> Trace:
    case_attributes = _flat_attributes(pm_trace.attributes)
    case_id = str(case_attributes.get(CONCEPT_NAME, f"trace_{trace_index}"))

    events: list[Event] = []
    for position, pm_event in enumerate(pm_trace):
        raw = dict(pm_event)
        activity = raw.pop(CONCEPT_NAME, None)
        timestamp = raw.pop(TIME_TIMESTAMP, None)
        if activity is None or str(activity) == "":
            raise LogParseError(
                f"Event {position} is missing '{CONCEPT_NAME}'", trace_index=trace_index
            )
        if timestamp is None:
            raise LogParseError(
                f"Event {position} is missing '{TIME_TIMESTAMP}'",
                trace_index=trace_index,
            )
        events.append(
            Event(
                activity=str(activity),
                case_id=case_id,
                timestamp=_instant(timestamp, position, trace_index),
                attributes=_flat_attributes(raw),
            )
        )

    if not events:
        raise LogParseError("Trace has no events", trace_index=trace_index)
    return Trace.from_events(case_id, events, case_attributes)


def _spool(stream: BinaryIO | bytes, directory: str) -> Path:
    """Copy the input to a file whose suffix tells the importer about gzip."""
    if isinstance(stream, bytes | bytearray):
        head, body = bytes(stream[:2]), None
    else:
        body = stream
        head = stream.read(2)
    path = Path(directory) / ("log.xes.gz" if head == _GZIP_MAGIC else "log.xes")
    with open(path, "wb") as target:
        if body is None:
            target.write(stream)  # type: ignore[arg-type]
        else:
            target.write(head)
            shutil.copyfileobj(body, target)
    return path


def parse_xes(stream: BinaryIO | bytes) -> EventLog:
    """
    Parse an XES document into an EventLog.

    Args:
        stream: Binary stream (or bytes) holding plain or gzip-compressed XES

    Returns:
        EventLog with one trace per <trace> element, events sorted by timestamp

    Raises:
        LogParseError: Malformed XML (with line/column), events lacking
            concept:name or time:timestamp (with trace index), duplicate case ids
    """
    with tempfile.TemporaryDirectory(prefix="xes-") as directory:
        try:
            path = _spool(stream, directory)
            pm_log = xes_importer.apply(
                os.fspath(path), variant=_VARIANT, parameters=_IMPORT_PARAMETERS
            )
        except etree.XMLSyntaxError as e:
            line, column = e.position
            raise LogParseError(
                f"Malformed XES document: {e.msg}", line=line, column=column
            )
        except (OSError, EOFError) as e:
            raise LogParseError(f"Unreadable XES stream: {e}")
        except ValueError as e:
            raise LogParseError(f"Invalid XES attribute value: {e}")

    traces = [_build_trace(pm_trace, index) for index, pm_trace in enumerate(pm_log)]
    try:
        log = EventLog(tuple(traces))
    except ValueError as e:
        raise LogParseError(str(e))

    logger.info(
        f"Parsed XES log: {len(log):,} traces, {log.event_count:,} events, "
        f"{len(log.alphabet)} activities"
    )
    return log
