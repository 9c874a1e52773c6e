"""
Pydantic schemas for synthetic log generation: the plant specification read
from a user JSON file and the ground truth written next to the logs.
"""

from datetime import datetime, timezone
from typing import Literal

from pydantic import BaseModel, Field, model_validator

from src.models.reports import SCHEMA_VERSION

Edge = tuple[str, str]


class WeightedSequence(BaseModel):
    """One activity sequence of the shared base model and its relative weight."""

    activities: list[str] = Field(..., min_length=1)
    weight: float = Field(default=1.0, gt=0)


class PlantedEdge(BaseModel):
    """
    An `a b` pair injected into traces of one variant.

    Each trace of the target variant receives the pair at `position` with
    probability `exclusivity`; the other variant never receives it.
    """

    edge: Edge
    exclusivity: float = Field(..., ge=0, le=1)
    position: int = Field(default=0, ge=0)
    variant: Literal[1, 2] = 1


class PlantedDuration(BaseModel):
    """Delay distribution of one edge in each variant, in days."""

    edge: Edge
    mean1: float = Field(..., gt=0)
    mean2: float = Field(..., gt=0)
    sd: float = Field(..., gt=0)


class PlantSpec(BaseModel):
    """Specification of a synthetic two-variant log."""

    n_traces_per_variant: int = Field(..., ge=1)
    base_model: list[WeightedSequence] = Field(..., min_length=1)
    planted_edges: list[PlantedEdge] = Field(default_factory=list)
    planted_durations: list[PlantedDuration] = Field(default_factory=list)
    default_delay_mean: float = Field(default=1.0, gt=0)
    default_delay_sd: float = Field(default=0.25, gt=0)
    start: datetime = Field(default=datetime(2020, 1, 1, tzinfo=timezone.utc))
    variant_attribute: str = Field(default="variant", min_length=1)
    seed: int = 42

    @model_validator(mode="after")
    def check_consistency(self) -> "PlantSpec":
        longest = max(len(sequence.activities) for sequence in self.base_model)
        for planted in self.planted_edges:
            if planted.position > longest:
                raise ValueError(
                    f"Planted edge {planted.edge} at position {planted.position} is "
                    f"beyond the longest base sequence ({longest})"
                )

        reachable = {
            pair
            for sequence in self.base_model
            for pair in zip(sequence.activities, sequence.activities[1:])
        } | {tuple(planted.edge) for planted in self.planted_edges}
        seen = set()
        for duration in self.planted_durations:
            edge = tuple(duration.edge)
            if edge in seen:
                raise ValueError(f"Duplicate planted duration for edge {edge}")
            seen.add(edge)
            if edge not in reachable:
                raise ValueError(f"Planted duration edge {edge} never occurs")
        return self


class GroundTruth(BaseModel):
    """Which edges were planted to differ between the variants."""

    schema_version: str = SCHEMA_VERSION
    seed: int
    n_traces: dict[str, int]
    control_flow_different: list[Edge] = Field(default_factory=list)
    seam_edges: list[Edge] = Field(default_factory=list)
    shifted_edges: list[Edge] = Field(default_factory=list)
    duration_different: list[Edge] = Field(default_factory=list)
