"""
Pydantic schemas for every artifact written to disk.

All documents carry a schema_version so downstream readers can detect layout
changes.
"""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = "1.0"


class VariantSummary(BaseModel):
    """Descriptive statistics of one process variant."""

    label: str = Field(default="", description="Variant label or predicate")
    cases: int = Field(..., ge=0, description="Number of traces")
    distinct_sequences: int = Field(
        ..., ge=0, description="Distinct activity sequences"
    )
    min_trace_len: int = Field(..., ge=0, description="Shortest trace length")
    max_trace_len: int = Field(..., ge=0, description="Longest trace length")
    avg_trace_len: float = Field(..., ge=0, description="Mean trace length")
    events: int = Field(..., ge=0, description="Total number of events")
    distinct_activities: int = Field(..., ge=0, description="Distinct activities")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "label": "amount >= 50",
                "cases": 21243,
                "distinct_sequences": 159,
                "min_trace_len": 2,
                "max_trace_len": 20,
                "avg_trace_len": 4.3,
                "events": 91499,
                "distinct_activities": 11,
            }
        }
    )


class VariantSummaryReport(BaseModel):
    """Descriptive statistics of both variants of a split."""

    schema_version: str = SCHEMA_VERSION
    predicate: str
    dropped: int = Field(0, ge=0, description="Traces matching neither predicate")
    missing_attribute: int = Field(0, ge=0, description="Traces lacking the attribute")
    variants: list[VariantSummary]


class CandidateRecord(BaseModel):
    """One row of the selection report."""

    unit: str = Field(..., description="Event name or 'a->b' edge label")
    kind: str = Field(..., description="event or edge")
    gamma1: float | None = Field(None, description="Mean class-1 share of test folds")
    gamma2: float | None = Field(None, description="Mean class-2 share of test folds")
    baseline_f1: float | None = Field(None, description="Mean worst-case weighted F1")
    weighted_f1: float | None = Field(None, description="Mean weighted F1")
    p_value: float | None = Field(None, description="One-sided p-value")
    p_value_display: str = Field("", description="Formatted p-value")
    q_value: float | None = Field(None, description="FDR-adjusted p-value")
    discriminatory: bool = Field(False, description="Significant improvement")
    exclusive_to: int | None = Field(
        None, description="Variant that alone contains the unit"
    )
    n_instances1: int = Field(0, ge=0, description="Variant-1 traces with the unit")
    n_instances2: int = Field(0, ge=0, description="Variant-2 traces with the unit")
    dataset_gamma1: float | None = Field(None, description="Whole-subset class-1 share")
    dataset_gamma2: float | None = Field(None, description="Whole-subset class-2 share")
    k_folds_used: int | None = Field(None, description="Folds actually run")
    skipped_reason: str | None = Field(None, description="Why no test was run")


class SelectionReport(BaseModel):
    """Selection report document."""

    schema_version: str = SCHEMA_VERSION
    feature_kind: str
    alpha: float
    fdr: bool = False
    summary: dict[str, int] = Field(default_factory=dict)
    candidates: list[CandidateRecord] = Field(default_factory=list)


class DurationRecord(BaseModel):
    """One row of the edge duration comparison."""

    edge: str = Field(..., description="'a->b' edge label")
    mean1_days: float | None = Field(None, description="Mean delay in variant 1")
    mean2_days: float | None = Field(None, description="Mean delay in variant 2")
    p_value: float | None = Field(None, description="Two-sided Welch p-value")
    p_value_display: str = Field("", description="Formatted p-value")
    n1: int = Field(0, ge=0, description="Variant-1 occurrences")
    n2: int = Field(0, ge=0, description="Variant-2 occurrences")
    dur_discriminatory: bool = Field(False, description="Significant difference")
    skipped_reason: str | None = Field(None, description="Why no test was run")


class FingerprintEdgeRecord(BaseModel):
    """A directly-follows edge of a fingerprint."""

    source: str
    target: str
    frequency: int = Field(..., ge=0)
    case_frequency: int = Field(..., ge=0)
    mean_duration_days: float = Field(..., ge=0)
    cf_discriminatory: bool = False
    dur_discriminatory: bool = False


class FingerprintDocument(BaseModel):
    """JSON rendering of a mutual fingerprint."""

    schema_version: str = SCHEMA_VERSION
    variant_id: int
    nodes: list[str]
    discriminatory_nodes: list[str] = Field(default_factory=list)
    edges: list[FingerprintEdgeRecord]
    retained_traces: int = Field(..., ge=0)
    total_traces: int = Field(..., ge=0)


class BaselineRecord(BaseModel):
    """One row of the edge-frequency baseline report."""

    edge: str
    case_frequency1: int = Field(..., ge=0)
    n1: int = Field(..., ge=0)
    case_frequency2: int = Field(..., ge=0)
    n2: int = Field(..., ge=0)
    statistic: float
    p_value: float
    p_value_display: str
    significant: bool


class RunManifest(BaseModel):
    """Everything needed to reproduce a run, plus informational measurements."""

    schema_version: str = SCHEMA_VERSION
    tool_version: str
    command: str
    seed: int
    parameters: dict[str, Any] = Field(default_factory=dict)
    input: dict[str, Any] = Field(default_factory=dict)
    variants: list[VariantSummary] = Field(default_factory=list)
    metrics: dict[str, Any] = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=list)
