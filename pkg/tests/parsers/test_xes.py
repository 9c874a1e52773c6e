"""
Unit tests for the XES parser.

Tests XES ingestion including:
- Minimal and namespaced documents
- Timestamp ordering and UTC normalization
- Typed case and event attributes
- Gzip-compressed input
- Error reporting with line/column and trace index
"""

import gzip
import io
from datetime import datetime, timezone

import pytest

from src.errors import LogParseError
from src.parsers.xes import parse_xes

XES_HEADER = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    '<log xes.version="1.0" xmlns="http://www.xes-standard.org/">\n'
)


def xes_event(activity: str | None, timestamp: str | None, extra: str = "") -> str:
    lines = ["    <event>"]
    if activity is not None:
        lines.append(f'      <string key="concept:name" value="{activity}"/>')
    if timestamp is not None:
        lines.append(f'      <date key="time:timestamp" value="{timestamp}"/>')
    if extra:
        lines.append(f"      {extra}")
    lines.append("    </event>")
    return "\n".join(lines)


def xes_document(*traces: str) -> bytes:
    return (XES_HEADER + "\n".join(traces) + "\n</log>\n").encode("utf-8")


def xes_trace(case_id: str | None, events: list[str], attributes: str = "") -> str:
    name = f'    <string key="concept:name" value="{case_id}"/>\n' if case_id else ""
    return f"  <trace>\n{name}{attributes}" + "\n".join(events) + "\n  </trace>"


class TestParseXes:
    """Test suite for parse_xes."""

    def test_single_trace(self):
        """Test that one trace with two events yields one trace and its alphabet."""
        doc = xes_document(
            xes_trace(
                "case_1",
                [
                    xes_event("A", "2021-01-01T10:00:00+00:00"),
                    xes_event("B", "2021-01-02T10:00:00+00:00"),
                ],
            )
        )
        log = parse_xes(doc)

        assert len(log) == 1
        assert log.alphabet == ("A", "B")
        assert log.traces[0].case_id == "case_1"
        assert log.traces[0].activities == ("A", "B")

    def test_events_resorted_by_timestamp(self):
        """Test that events out of timestamp order are sorted ascending."""
        doc = xes_document(
            xes_trace(
                "case_1",
                [
                    xes_event("C", "2021-01-03T00:00:00+00:00"),
                    xes_event("A", "2021-01-01T00:00:00+00:00"),
                    xes_event("B", "2021-01-02T00:00:00+00:00"),
                ],
            )
        )
        log = parse_xes(doc)

        assert log.traces[0].activities == ("A", "B", "C")

    def test_timestamp_ties_keep_file_order(self):
        """Test that equal timestamps keep their document order."""
        doc = xes_document(
            xes_trace(
                "case_1",
                [
                    xes_event("B", "2021-01-01T00:00:00+00:00"),
                    xes_event("A", "2021-01-01T00:00:00+00:00"),
                ],
            )
        )
        assert parse_xes(doc).traces[0].activities == ("B", "A")

    def test_timestamps_normalized_to_utc(self):
        """Test that offsets are converted to UTC."""
        doc = xes_document(
            xes_trace("case_1", [xes_event("A", "2021-01-01T10:00:00.000+01:00")])
        )
        event = parse_xes(doc).traces[0].events[0]

        assert event.timestamp == datetime(2021, 1, 1, 9, 0, tzinfo=timezone.utc)

    def test_typed_attributes(self):
        """Test that case and event attributes keep their XES types."""
        attributes = (
            '    <float key="amount" value="35.0"/>\n'
            '    <int key="points" value="3"/>\n'
            '    <boolean key="paid" value="true"/>\n'
        )
        doc = xes_document(
            xes_trace(
                "case_1",
                [
                    xes_event(
                        "A",
                        "2021-01-01T00:00:00+00:00",
                        '<string key="org:resource" value="clerk"/>',
                    )
                ],
                attributes,
            )
        )
        trace = parse_xes(doc).traces[0]

        assert trace.case_attributes["amount"] == 35.0
        assert trace.case_attributes["points"] == 3
        assert trace.case_attributes["paid"] is True
        assert trace.events[0].attributes == {"org:resource": "clerk"}
        assert "concept:name" not in trace.events[0].attributes

    def test_missing_case_name_gets_index(self):
        """Test that a trace without concept:name is named after its index."""
        doc = xes_document(
            xes_trace(None, [xes_event("A", "2021-01-01T00:00:00+00:00")])
        )
        assert parse_xes(doc).traces[0].case_id == "trace_0"

    def test_gzip_input(self):
        """Test that gzip-compressed documents are detected and read."""
        doc = xes_document(
            xes_trace("case_1", [xes_event("A", "2021-01-01T00:00:00+00:00")])
        )
        log = parse_xes(io.BytesIO(gzip.compress(doc)))

        assert len(log) == 1

    def test_malformed_xml_reports_position(self):
        """Test that malformed XML raises with line and column."""
        doc = XES_HEADER.encode() + b"  <trace>\n    <event>\n  </trace>\n</log>\n"

        with pytest.raises(LogParseError) as exc_info:
            parse_xes(doc)

        assert exc_info.value.line is not None
        assert exc_info.value.column is not None
        assert "line" in str(exc_info.value)

    def test_missing_timestamp_names_trace(self):
        """Test that an event without time:timestamp names the trace index."""
        doc = xes_document(
            xes_trace("ok", [xes_event("A", "2021-01-01T00:00:00+00:00")]),
            xes_trace("broken", [xes_event("A", None)]),
        )
        with pytest.raises(LogParseError) as exc_info:
            parse_xes(doc)

        assert exc_info.value.trace_index == 1
        assert "time:timestamp" in str(exc_info.value)
        assert "trace 1" in str(exc_info.value)

    def test_missing_activity_names_trace(self):
        """Test that an event without concept:name is rejected."""
        doc = xes_document(xes_trace("c", [xes_event(None, "2021-01-01T00:00:00Z")]))

        with pytest.raises(LogParseError, match="concept:name"):
            parse_xes(doc)

    def test_duplicate_case_ids_rejected(self):
        """Test that two traces sharing a case id are rejected."""
        trace = xes_trace("same", [xes_event("A", "2021-01-01T00:00:00+00:00")])

        with pytest.raises(LogParseError, match="Duplicate case id"):
            parse_xes(xes_document(trace, trace))

    def test_file_handle_input(self, tmp_path):
        """Test that an open .xes.gz file handle is read like the CLI reads it."""
        path = tmp_path / "log.xes.gz"
        path.write_bytes(
            gzip.compress(
                xes_document(
                    xes_trace("c1", [xes_event("A", "2021-01-01T00:00:00+00:00")]),
                    xes_trace("c2", [xes_event("B", "2021-01-01T00:00:00+00:00")]),
                )
            )
        )
        with open(path, "rb") as handle:
            log = parse_xes(handle)

        assert [trace.case_id for trace in log.traces] == ["c1", "c2"]

    def test_date_attribute_kept_as_iso_text(self):
        """Test that a date-typed case attribute becomes an ISO-8601 string."""
        doc = xes_document(
            xes_trace(
                "case_1",
                [xes_event("A", "2021-01-01T00:00:00+00:00")],
                '    <date key="due" value="2021-02-01T00:00:00+00:00"/>\n',
            )
        )
        due = parse_xes(doc).traces[0].case_attributes["due"]

        assert isinstance(due, str)
        assert due.startswith("2021-02-01T00:00:00")
