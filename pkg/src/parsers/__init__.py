"""
Event log readers and the variant split.
"""

from .csv_log import CsvColumnMapping, parse_csv, write_csv  # noqa: F401
from .variants import parse_split_rule, split_variants, summarize  # noqa: F401
from .xes import parse_xes  # noqa: F401

__all__ = [
    # Readers and writers
    "CsvColumnMapping",
    "parse_csv",
    "parse_xes",
    "write_csv",
    # Variants
    "parse_split_rule",
    "split_variants",
    "summarize",
]
