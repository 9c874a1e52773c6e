"""
Exception hierarchy for the process variant fingerprint toolkit.

Every error raised on purpose by the library derives from FingerprintError so
the CLI can report it with a clean message and exit code 1.
"""


class FingerprintError(Exception):
    """Base class for all toolkit errors."""


class LogParseError(FingerprintError):
    """An event log could not be parsed."""

    def __init__(
        self,
        message: str,
        *,
        line: int | None = None,
        column: int | None = None,
        row: int | None = None,
        trace_index: int | None = None,
    ):
        self.line = line
        self.column = column
        self.row = row
        self.trace_index = trace_index

        location = []
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column}")
        if row is not None:
            location.append(f"row {row}")
        if trace_index is not None:
            location.append(f"trace {trace_index}")

        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class ConfigurationError(FingerprintError):
    """Invalid user configuration (column mapping, split rule, parameters)."""


class DegenerateSplitError(FingerprintError):
    """A variant split produced an empty variant."""


class DimensionError(FingerprintError):
    """Vector or matrix dimensions do not match or exceed the supported cap."""


class InsufficientDataError(FingerprintError):
    """Too few instances or observations for the requested computation."""


class DegenerateTrainingSetError(InsufficientDataError):
    """A classifier was asked to train on a single class."""


class StatisticsError(FingerprintError):
    """Invalid arguments to a statistical routine."""
