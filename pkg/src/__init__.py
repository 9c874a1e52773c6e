"""
Process variant fingerprints package.

This package detects statistically significant control-flow and duration
differences between two process variants recorded in event logs, and renders
them as annotated directly-follows graphs ("mutual fingerprints").
"""

__version__ = "1.0.0"
__title__ = "Process Variant Fingerprints"
__description__ = (
    "Wavelet-encoded trace comparison and mutual fingerprint discovery "
    "for process variant analysis"
)
__author__ = "Process Analytics Team"
