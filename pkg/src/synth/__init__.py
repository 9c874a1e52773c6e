"""
Synthetic event logs with planted differences.
"""

from .generator import SyntheticLogs, generate, split_in_halves  # noqa: F401

__all__ = ["SyntheticLogs", "generate", "split_in_halves"]
