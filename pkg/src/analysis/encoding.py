"""
Trace encoding: binarization, wavelet vectorization and stacking.

Each feature unit (an activity, or a directly-follows pair of activities)
turns a trace into a 0/1 indicator series over positions. The series is
zero-padded to the shared basis dimension and transformed into Haar
coefficients. A trace's stacked vector keeps only the blocks of units that
actually occur in it; absent blocks are implicitly zero.
"""

import io
import logging
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from types import MappingProxyType

import numpy as np
import pandas as pd
from scipy import sparse

from src.analysis.haar import (
    HaarBasis,
    TimeSeries,
    WaveletVector,
    build_basis,
    dwt_rows,
    exponent_for,
    idwt,
)
from src.errors import DegenerateSplitError, DimensionError
from src.models.events import EventLog, Trace, VariantSplit

logger = logging.getLogger(__name__)

EDGE_SEPARATOR = "->"


class FeatureKind(StrEnum):
    """Granularity of a candidate feature."""

    EVENT = "event"
    EDGE = "edge"

    @classmethod
    def from_option(cls, value: str) -> "FeatureKind":
        """Accept the CLI spellings 'events'/'edges' as well as the enum values."""
        normalized = value.strip().lower().rstrip("s")
        try:
            return cls(normalized)
        except ValueError:
            raise ValueError(f"Unknown feature kind '{value}' (use events or edges)")


@dataclass(frozen=True, order=True)
class FeatureUnit:
    """A single activity or an ordered directly-follows pair."""

    kind: FeatureKind
    symbols: tuple[str, ...]

    def __post_init__(self):
        expected = 1 if self.kind == FeatureKind.EVENT else 2
        if len(self.symbols) != expected:
            raise ValueError(
                f"{self.kind.value} unit needs {expected} symbol(s), got {self.symbols}"
            )

    @classmethod
    def event(cls, activity: str) -> "FeatureUnit":
        return cls(FeatureKind.EVENT, (activity,))

    @classmethod
    def edge(cls, source: str, target: str) -> "FeatureUnit":
        return cls(FeatureKind.EDGE, (source, target))

    @property
    def label(self) -> str:
        return EDGE_SEPARATOR.join(self.symbols)

    def __str__(self) -> str:
        return self.label


def _occurrences(trace: Trace, kind: FeatureKind) -> dict[FeatureUnit, list[int]]:
    """Positions at which each unit occurs (edges indexed by their start)."""
    positions: dict[FeatureUnit, list[int]] = defaultdict(list)
    if kind == FeatureKind.EVENT:
        for j, activity in enumerate(trace.activities):
            positions[FeatureUnit.event(activity)].append(j)
    else:
        for j, (source, target) in enumerate(trace.edges()):
            positions[FeatureUnit.edge(source, target)].append(j)
    return positions


def _series_length(trace: Trace, kind: FeatureKind) -> int:
    if kind == FeatureKind.EVENT:
        return len(trace)
    return max(len(trace) - 1, 1)


def _indicator(positions: Iterable[int], length: int, dim: int) -> TimeSeries:
    values = np.zeros(dim, dtype=np.float64)
    values[list(positions)] = 1.0
    return TimeSeries(values, original_len=length)


def binarize(trace: Trace, unit: FeatureUnit, dim: int) -> TimeSeries:
    """
    Indicator series of a unit over the positions of a trace.

    Event units mark every position holding the activity. Edge units mark the
    start position of every occurrence of the pair, so the last position of the
    trace is always 0.

    Raises:
        DimensionError: dim shorter than the series, or not a power of two
    """
    length = _series_length(trace, unit.kind)
    if dim < length:
        raise DimensionError(
            f"Dimension {dim} is shorter than the {unit.kind.value} series of "
            f"trace '{trace.case_id}' ({length})"
        )
    positions = _occurrences(trace, unit.kind).get(unit, [])
    return _indicator(positions, length, dim)


@dataclass(frozen=True)
class StackedVector:
    """Sparse stacked wavelet vector of one trace."""

    case_id: str
    blocks: Mapping[FeatureUnit, WaveletVector] = field(
        default_factory=lambda: MappingProxyType({})
    )

    def __post_init__(self):
        object.__setattr__(self, "blocks", MappingProxyType(dict(self.blocks)))

    def __contains__(self, unit: FeatureUnit) -> bool:
        return unit in self.blocks

    def coefficients(self, unit: FeatureUnit, dim: int) -> np.ndarray:
        """The unit's block, or zeros when the unit does not occur."""
        block = self.blocks.get(unit)
        if block is None:
            return np.zeros(dim, dtype=np.float64)
        return block.coeffs


def encode_trace(
    trace: Trace, units: Sequence[FeatureUnit], basis: HaarBasis
) -> StackedVector:
    """
    Encode one trace over the given units.

    Only units that occur in the trace get a block. Every block holds the Haar
    coefficients of the unit's padded indicator series.
    """
    wanted = set(units)
    blocks: dict[FeatureUnit, WaveletVector] = {}
    for kind in {unit.kind for unit in wanted}:
        length = _series_length(trace, kind)
        if basis.dim < length:
            raise DimensionError(
                f"Basis dimension {basis.dim} is shorter than trace "
                f"'{trace.case_id}' ({length})"
            )
        present = [
            (unit, positions)
            for unit, positions in _occurrences(trace, kind).items()
            if unit in wanted
        ]
        if not present:
            continue
        indicators = np.zeros((len(present), basis.dim), dtype=np.float64)
        for row, (_, positions) in enumerate(present):
            indicators[row, positions] = 1.0
        for (unit, _), coeffs in zip(present, dwt_rows(indicators, basis)):
            blocks[unit] = WaveletVector(coeffs)
    return StackedVector(trace.case_id, blocks)


def decode_trace(
    vector: StackedVector, basis: HaarBasis, length: int
) -> tuple[str, ...]:
    """
    Recover the activity sequence from the event blocks of a stacked vector.

    Raises:
        DimensionError: A position is claimed by zero or several activities
    """
    claimed: list[str | None] = [None] * length
    for unit, block in vector.blocks.items():
        if unit.kind != FeatureKind.EVENT:
            continue
        series = idwt(block, basis).values
        for j in np.flatnonzero(np.abs(series[:length] - 1.0) < 1e-9):
            if claimed[j] is not None:
                raise DimensionError(f"Position {j} decodes to several activities")
            claimed[j] = unit.symbols[0]
    if any(activity is None for activity in claimed):
        raise DimensionError("Stacked vector does not determine every position")
    return tuple(claimed)  # type: ignore[arg-type]


@dataclass(frozen=True)
class ColumnLayout:
    """Dense column order: every unit contributes `dim` consecutive columns."""

    units: tuple[FeatureUnit, ...]
    dim: int

    def __len__(self) -> int:
        return len(self.units) * self.dim

    @cached_property
    def offsets(self) -> dict[FeatureUnit, int]:
        return {unit: i * self.dim for i, unit in enumerate(self.units)}

    @property
    def columns(self) -> list[tuple[FeatureUnit, int]]:
        return [(unit, index) for unit in self.units for index in range(self.dim)]

    @property
    def headers(self) -> list[str]:
        return [f"{unit.label}:{index}" for unit, index in self.columns]

    def slice(self, unit: FeatureUnit) -> slice:
        start = self.offsets[unit]
        return slice(start, start + self.dim)


@dataclass(frozen=True)
class DesignMatrix:
    """Stacked vectors of one variant over a shared column layout."""

    rows: tuple[StackedVector, ...]
    variant_id: int
    layout: ColumnLayout

    def __post_init__(self):
        if self.variant_id not in (1, 2):
            raise ValueError(f"variant_id must be 1 or 2, got {self.variant_id}")
        object.__setattr__(self, "rows", tuple(self.rows))

    def __len__(self) -> int:
        return len(self.rows)

    def to_dense(self) -> np.ndarray:
        """Dense (rows × layout) matrix; absent blocks become zeros."""
        dense = np.zeros((len(self.rows), len(self.layout)), dtype=np.float64)
        for i, row in enumerate(self.rows):
            for unit, block in row.blocks.items():
                dense[i, self.layout.slice(unit)] = block.coeffs
        return dense


def sparsify_row(
    dense: np.ndarray, layout: ColumnLayout, case_id: str
) -> StackedVector:
    """Inverse of densification: keep the blocks with any non-zero entry."""
    blocks = {}
    for unit in layout.units:
        coeffs = dense[layout.slice(unit)]
        if np.any(coeffs != 0):
            blocks[unit] = WaveletVector(coeffs)
    return StackedVector(case_id, blocks)


@dataclass(frozen=True)
class AugmentedDesignMatrix:
    """Both variants' design matrices stacked, with class labels 1 and 2."""

    design1: DesignMatrix
    design2: DesignMatrix

    def __post_init__(self):
        if self.design1.layout != self.design2.layout:
            raise DimensionError("Design matrices of a split must share one layout")
        if (self.design1.variant_id, self.design2.variant_id) != (1, 2):
            raise ValueError("Augmented design expects variant 1 then variant 2")

    @property
    def layout(self) -> ColumnLayout:
        return self.design1.layout

    def __len__(self) -> int:
        return len(self.design1) + len(self.design2)

    @cached_property
    def rows(self) -> tuple[StackedVector, ...]:
        return self.design1.rows + self.design2.rows

    @cached_property
    def labels(self) -> np.ndarray:
        labels = np.concatenate(
            [
                np.full(len(self.design1), 1, dtype=np.int8),
                np.full(len(self.design2), 2, dtype=np.int8),
            ]
        )
        labels.setflags(write=False)
        return labels

    @cached_property
    def unit_index(self) -> dict[FeatureUnit, np.ndarray]:
        """Row indices of the traces containing each unit."""
        index: dict[FeatureUnit, list[int]] = defaultdict(list)
        for i, row in enumerate(self.rows):
            for unit in row.blocks:
                index[unit].append(i)
        return {unit: np.asarray(rows, dtype=np.int64) for unit, rows in index.items()}

    def rows_containing(self, unit: FeatureUnit) -> np.ndarray:
        return self.unit_index.get(unit, np.empty(0, dtype=np.int64))

    def unit_block(self, unit: FeatureUnit, indices: np.ndarray) -> np.ndarray:
        """The unit's coefficient columns for the given rows."""
        dim = self.layout.dim
        if len(indices) == 0:
            return np.zeros((0, dim), dtype=np.float64)
        return np.vstack([self.rows[i].coefficients(unit, dim) for i in indices])

    def to_sparse(self) -> sparse.csr_matrix:
        """CSR matrix of the features with the label as the last column."""
        data, row_ids, col_ids = [], [], []
        for i, row in enumerate(self.rows):
            for unit, block in row.blocks.items():
                nonzero = np.flatnonzero(block.coeffs)
                data.extend(block.coeffs[nonzero])
                row_ids.extend([i] * len(nonzero))
                col_ids.extend(self.layout.offsets[unit] + nonzero)
        label_column = len(self.layout)
        data.extend(self.labels.astype(np.float64))
        row_ids.extend(range(len(self)))
        col_ids.extend([label_column] * len(self))
        return sparse.csr_matrix(
            (data, (row_ids, col_ids)), shape=(len(self), label_column + 1)
        )


def enumerate_candidates(split: VariantSplit, kind: FeatureKind) -> list[FeatureUnit]:
    """Candidate units: the universal alphabet, or every edge seen in either variant."""
    if kind == FeatureKind.EVENT:
        return [FeatureUnit.event(activity) for activity in split.universal_alphabet]
    edges = {
        FeatureUnit.edge(source, target)
        for variant in (split.variant1, split.variant2)
        for trace in variant
        for source, target in trace.edges()
    }
    return sorted(edges)


def build_design(
    variant: EventLog,
    units: Sequence[FeatureUnit],
    basis: HaarBasis,
    variant_id: int,
    layout: ColumnLayout | None = None,
) -> DesignMatrix:
    """Encode every trace of a variant, preserving trace order."""
    if layout is None:
        layout = ColumnLayout(tuple(units), basis.dim)
    if layout.dim != basis.dim:
        raise DimensionError(
            f"Layout dimension {layout.dim} does not match basis {basis.dim}"
        )
    rows = tuple(encode_trace(trace, layout.units, basis) for trace in variant)
    return DesignMatrix(rows=rows, variant_id=variant_id, layout=layout)


def build_augmented(
    split: VariantSplit, kind: FeatureKind
) -> tuple[AugmentedDesignMatrix, list[FeatureUnit]]:
    """
    Encode both variants of a split in one shared vector space.

    The basis dimension is the next power of two at or above the longest trace
    of either variant.

    Returns:
        The augmented design matrix and the enumerated candidate units
    """
    if not len(split.variant1) or not len(split.variant2):
        raise DegenerateSplitError("degenerate split: a variant has no traces")
    units = enumerate_candidates(split, kind)
    basis = build_basis(exponent_for(split.max_trace_len))
    layout = ColumnLayout(tuple(units), basis.dim)
    design1 = build_design(split.variant1, units, basis, 1, layout)
    design2 = build_design(split.variant2, units, basis, 2, layout)
    logger.info(
        f"Encoded {len(design1) + len(design2):,} traces over {len(units):,} "
        f"{kind.value} units (dimension {basis.dim})"
    )
    return AugmentedDesignMatrix(design1, design2), units


def design_frame(aug: AugmentedDesignMatrix) -> pd.DataFrame:
    """Dense augmented matrix as a frame: case_id, 'unit:index' columns, label."""
    dense = np.vstack([aug.design1.to_dense(), aug.design2.to_dense()])
    frame = pd.DataFrame(dense, columns=aug.layout.headers)
    frame.insert(0, "case_id", [row.case_id for row in aug.rows])
    frame["label"] = aug.labels.astype(int)
    return frame


def dump_design_csv(aug: AugmentedDesignMatrix, float_format: str = "%.6g") -> bytes:
    """CSV rendering of the augmented design matrix."""
    buffer = io.StringIO()
    design_frame(aug).to_csv(
        buffer, index=False, float_format=float_format, lineterminator="\n"
    )
    return buffer.getvalue().encode("utf-8")
