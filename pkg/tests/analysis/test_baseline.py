"""
Unit tests for the edge-frequency baseline.
"""

import pytest

from src.analysis.baseline import case_frequencies, edge_frequency_baseline
from src.analysis.encoding import FeatureUnit


class TestEdgeFrequencyBaseline:
    """Test suite for edge_frequency_baseline."""

    def test_case_frequencies(self, make_log):
        """Test that an edge is counted once per containing trace."""
        counts = case_frequencies(make_log([["a", "b", "a", "b"], ["a", "b"], ["b"]]))
        assert counts[FeatureUnit.edge("a", "b")] == 2
        assert counts[FeatureUnit.edge("b", "a")] == 1

    def test_frequency_shift_detected(self, make_split):
        """Test an edge present in most of one variant and few of the other."""
        split = make_split(
            [["a", "b"]] * 18 + [["a", "c"]] * 2, [["a", "b"]] * 2 + [["a", "c"]] * 18
        )
        rows = {row.edge: row for row in edge_frequency_baseline(split, 0.05)}

        row = rows[FeatureUnit.edge("a", "b")]
        assert row.significant
        assert (row.case_frequency1, row.case_frequency2) == (18, 2)
        assert row.to_record().p_value_display

    def test_position_shift_not_detected(self, make_split):
        """Test that an edge moved to another position goes unnoticed."""
        split = make_split([["a", "b", "x"]] * 20, [["x", "a", "b"]] * 20)
        rows = {row.edge: row for row in edge_frequency_baseline(split, 0.05)}

        row = rows[FeatureUnit.edge("a", "b")]
        assert not row.significant
        assert row.p_value == pytest.approx(1.0)

    def test_rows_sorted(self, toy_split):
        rows = edge_frequency_baseline(toy_split, 0.05)
        assert [row.edge for row in rows] == sorted(row.edge for row in rows)
