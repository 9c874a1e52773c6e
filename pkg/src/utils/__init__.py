"""
Utility modules for logging setup and artifact serialization.
"""

from .log_config import FingerprintLogger  # noqa: F401
from .serialization import (  # noqa: F401
    file_sha256,
    records_frame,
    write_bytes,
    write_json,
    write_records_csv,
)

__all__ = [
    # Logging
    "FingerprintLogger",
    # Serialization
    "file_sha256",
    "records_frame",
    "write_bytes",
    "write_json",
    "write_records_csv",
]
