"""
Tests for the artifact writers.
"""

import hashlib
import json

from pydantic import BaseModel

from src.utils.serialization import (
    file_sha256,
    records_frame,
    write_bytes,
    write_json,
    write_records_csv,
)


class Row(BaseModel):
    name: str
    score: float | None = None
    flagged: bool = False


class TestWriters:
    """Test suite for the CSV and JSON writers."""

    def test_write_bytes_creates_parents(self, tmp_path):
        path = write_bytes(tmp_path / "a" / "b.bin", b"xyz")
        assert path.read_bytes() == b"xyz"

    def test_records_csv(self, tmp_path):
        path = write_records_csv(
            tmp_path / "rows.csv",
            [Row(name="a", score=1 / 3, flagged=True), Row(name="b")],
            Row,
        )
        assert path.read_text() == "name,score,flagged\na,0.333333,True\nb,,False\n"

    def test_empty_records_keep_header(self, tmp_path):
        path = write_records_csv(
            tmp_path / "rows.csv", [], Row, columns=["flagged", "name"]
        )
        assert path.read_text() == "flagged,name\n"

    def test_column_selection(self):
        rows = [Row(name="a", score=2.0)]
        frame = records_frame(rows, Row, columns=["score", "name"])
        assert list(frame.columns) == ["score", "name"]

    def test_json(self, tmp_path):
        path = write_json(tmp_path / "row.json", Row(name="a", score=0.5))
        assert path.read_text().endswith("\n")
        document = json.loads(path.read_text())
        assert document == {"name": "a", "score": 0.5, "flagged": False}

    def test_identical_inputs_identical_bytes(self, tmp_path):
        rows = [Row(name="a", score=0.1), Row(name="b", score=0.2)]
        first = write_records_csv(tmp_path / "1.csv", rows, Row).read_bytes()
        second = write_records_csv(tmp_path / "2.csv", rows, Row).read_bytes()
        assert first == second

    def test_file_sha256(self, tmp_path):
        path = write_bytes(tmp_path / "data.bin", b"x" * 3_000_000)
        expected = hashlib.sha256(b"x" * 3_000_000).hexdigest()
        assert file_sha256(path) == expected
