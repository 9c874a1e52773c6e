"""
Unit tests for the CSV event log parser and writer.

Tests CSV ingestion including:
- Grouping rows into traces
- Timestamp sorting and custom formats
- Scalar coercion of attribute values
- Case attribute columns
- Error reporting (missing columns, bad timestamps, empty files)
- Round trip through the canonical CSV layout
"""

import pytest

from src.errors import ConfigurationError, LogParseError
from src.models.events import EventLog
from src.parsers.csv_log import CsvColumnMapping, coerce_scalar, parse_csv, write_csv


@pytest.fixture
def mapping():
    """Default column mapping."""
    return CsvColumnMapping()


class TestCoerceScalar:
    """Test suite for coerce_scalar."""

    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("42", 42),
            ("-3", -3),
            ("1.5", 1.5),
            ("TRUE", True),
            ("false", False),
            ("abc", "abc"),
            ("nan", "nan"),
        ],
    )
    def test_coercion(self, raw, expected):
        """Test numeric, boolean and string coercion."""
        value = coerce_scalar(raw)
        assert value == expected
        assert type(value) is type(expected)

    def test_empty_is_absent(self):
        """Test that empty cells mean 'no value'."""
        assert coerce_scalar("") is None


class TestParseCsv:
    """Test suite for parse_csv."""

    def test_rows_grouped_by_case(self, mapping):
        """Test that 3 rows with 2 case ids give 2 traces."""
        data = (
            b"case_id,activity,timestamp\n"
            b"c1,A,2021-01-01T00:00:00Z\n"
            b"c2,A,2021-01-01T00:00:00Z\n"
            b"c1,B,2021-01-02T00:00:00Z\n"
        )
        log = parse_csv(data, mapping)

        assert len(log) == 2
        assert [t.case_id for t in log] == ["c1", "c2"]
        assert log.traces[0].activities == ("A", "B")

    def test_shuffled_rows_sorted(self, mapping):
        """Test that rows of one case in shuffled order form a sorted trace."""
        data = (
            b"case_id,activity,timestamp\n"
            b"c1,C,2021-01-03T00:00:00Z\n"
            b"c1,A,2021-01-01T00:00:00Z\n"
            b"c1,B,2021-01-02T00:00:00Z\n"
        )
        assert parse_csv(data, mapping).traces[0].activities == ("A", "B", "C")

    def test_header_only_is_error(self, mapping):
        """Test that a file without rows is rejected with 'no traces'."""
        with pytest.raises(LogParseError, match="no traces"):
            parse_csv(b"case_id,activity,timestamp\n", mapping)

    def test_missing_mapped_column(self, mapping):
        """Test that a mapped column absent from the header is a config error."""
        data = b"case,activity,timestamp\nc1,A,2021-01-01T00:00:00Z\n"

        with pytest.raises(ConfigurationError, match="case_id"):
            parse_csv(data, mapping)

    def test_bad_timestamp_reports_row(self, mapping):
        """Test that an unparseable timestamp names its row (header is row 1)."""
        data = (
            b"case_id,activity,timestamp\n"
            b"c1,A,2021-01-01T00:00:00Z\n"
            b"c1,B,not-a-date\n"
        )
        with pytest.raises(LogParseError) as exc_info:
            parse_csv(data, mapping)

        assert exc_info.value.row == 3
        assert "row 3" in str(exc_info.value)

    def test_custom_mapping_and_format(self):
        """Test renamed columns with an explicit timestamp format."""
        mapping = CsvColumnMapping(
            case_column="Case",
            activity_column="Act",
            timestamp_column="When",
            timestamp_format="%d/%m/%Y %H:%M",
        )
        data = b"Case,Act,When\nx,A,02/01/2021 10:00\nx,B,01/01/2021 10:00\n"
        trace = parse_csv(data, mapping).traces[0]

        assert trace.activities == ("B", "A")
        assert trace.events[0].timestamp.day == 1

    def test_attributes_coerced(self, mapping):
        """Test that extra columns become typed event attributes."""
        data = (
            b"case_id,activity,timestamp,amount,resource,paid\n"
            b"c1,A,2021-01-01T00:00:00Z,35,clerk,true\n"
            b"c1,B,2021-01-02T00:00:00Z,,clerk,\n"
        )
        trace = parse_csv(data, mapping).traces[0]

        assert trace.events[0].attributes == {
            "amount": 35,
            "resource": "clerk",
            "paid": True,
        }
        assert trace.events[1].attributes == {"resource": "clerk"}
        assert trace.attribute("amount") == 35

    def test_case_prefixed_columns(self, mapping):
        """Test that case: columns become case attributes."""
        data = (
            b"case_id,activity,timestamp,case:age\n"
            b"c1,A,2021-01-01T00:00:00Z,71\n"
            b"c1,B,2021-01-02T00:00:00Z,71\n"
        )
        trace = parse_csv(data, mapping).traces[0]

        assert trace.case_attributes == {"age": 71}
        assert trace.events[0].attributes == {}

    def test_empty_activity_rejected(self, mapping):
        """Test that an empty activity cell is rejected with its row."""
        data = b"case_id,activity,timestamp\nc1,,2021-01-01T00:00:00Z\n"

        with pytest.raises(LogParseError, match="row 2"):
            parse_csv(data, mapping)


class TestWriteCsv:
    """Test suite for the canonical CSV writer."""

    def test_round_trip(self, mapping):
        """Test that parse, write and parse again yields an identical log."""
        data = (
            b"case_id,activity,timestamp,amount,resource,case:age\n"
            b"c1,A,2021-01-01T08:30:00.250000+02:00,35.5,clerk,71\n"
            b"c1,B,2021-01-02T00:00:00Z,12,,71\n"
            b"c2,B,2021-01-05T00:00:00Z,,boss,30\n"
        )
        first = parse_csv(data, mapping)
        second = parse_csv(write_csv(first), mapping)

        assert second == first

    def test_typed_source_strings_recoerced(self, make_trace, mapping):
        """Test that value-looking strings from a typed log are re-coerced."""
        attributes = {
            "code": "007",
            "flag": "true",
            "rate": "1.5",
            "note": "",
            "who": "x",
        }
        log = EventLog((make_trace("c1", ["A"], case_attributes=attributes),))

        reread = parse_csv(write_csv(log), mapping).traces[0].case_attributes

        assert reread == {"code": 7, "flag": True, "rate": 1.5, "who": "x"}

    def test_header_layout(self, make_trace):
        """Test the canonical column order."""
        log = EventLog((make_trace("c1", ["A", "B"], case_attributes={"variant": 1}),))
        header = write_csv(log).decode().splitlines()[0]

        assert header == "case_id,activity,timestamp,case:variant"
