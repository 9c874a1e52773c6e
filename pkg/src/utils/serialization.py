"""
Deterministic artifact writers.

CSV reports are rendered with pandas from Pydantic records, JSON documents
with Pydantic's serializer. Identical inputs give byte-identical files.
"""

import hashlib
from collections.abc import Sequence
from pathlib import Path

import pandas as pd
from pydantic import BaseModel


def write_bytes(path: Path, data: bytes) -> Path:
    """Write bytes, creating parent directories."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    return path


def records_frame(
    records: Sequence[BaseModel],
    model: type[BaseModel],
    columns: Sequence[str] | None = None,
) -> pd.DataFrame:
    """Frame of records; an empty sequence still yields the model's header."""
    header = list(columns) if columns else list(model.model_fields)
    rows = [record.model_dump(mode="json") for record in records]
    return pd.DataFrame(rows, columns=header)


def write_records_csv(
    path: Path,
    records: Sequence[BaseModel],
    model: type[BaseModel],
    columns: Sequence[str] | None = None,
    float_format: str = "%.6g",
) -> Path:
    frame = records_frame(records, model, columns)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=float_format, lineterminator="\n")
    return path


def write_json(path: Path, document: BaseModel) -> Path:
    payload = document.model_dump_json(indent=2) + "\n"
    return write_bytes(path, payload.encode("utf-8"))


def file_sha256(path: Path, chunk_size: int = 1 << 20) -> str:
    """SHA-256 hex digest of a file, read in chunks."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()
