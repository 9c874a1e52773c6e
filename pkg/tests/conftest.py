"""
Test configuration and shared fixtures.

This module provides:
- Factories for traces, logs and variant splits
- The two-variant toy log used throughout the worked examples
- Plant specifications for synthetic logs with known differences
- Isolation of the package loggers between tests
"""

import logging
import os
import sys
from collections.abc import Sequence
from datetime import datetime, timedelta, timezone

import pytest

# Add project root to Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.models.events import Event, EventLog, Trace, VariantSplit  # noqa: E402
from src.models.synth import PlantSpec  # noqa: E402
from src.utils.log_config import PACKAGE_LOGGERS  # noqa: E402

T0 = datetime(2021, 1, 1, tzinfo=timezone.utc)


def build_trace(
    case_id: str,
    activities: Sequence[str],
    delays: Sequence[float] | None = None,
    case_attributes: dict | None = None,
    start: datetime = T0,
) -> Trace:
    """Trace of the given activities, `delays` days apart (1 day by default)."""
    if delays is None:
        delays = [1.0] * (len(activities) - 1)
    events = []
    instant = start
    for position, activity in enumerate(activities):
        if position:
            instant = instant + timedelta(days=delays[position - 1])
        events.append(Event(activity, case_id, instant))
    return Trace(case_id, tuple(events), case_attributes or {})


def build_log(sequences: Sequence[Sequence[str]], prefix: str = "case") -> EventLog:
    return EventLog(
        tuple(
            build_trace(f"{prefix}_{i}", list(sequence))
            for i, sequence in enumerate(sequences)
        )
    )


def build_split(
    sequences1: Sequence[Sequence[str]], sequences2: Sequence[Sequence[str]]
) -> VariantSplit:
    return VariantSplit(
        variant1=build_log(sequences1, prefix="v1"),
        variant2=build_log(sequences2, prefix="v2"),
        predicate_description="group = 1 | group = 2",
    )


@pytest.fixture
def make_trace():
    """Factory for traces with daily spaced events."""
    return build_trace


@pytest.fixture
def make_log():
    """Factory for logs from activity sequences."""
    return build_log


@pytest.fixture
def make_split():
    """Factory for variant splits from two lists of activity sequences."""
    return build_split


@pytest.fixture
def toy_split():
    """σ1=e1e2e1e1, σ2=e1e2e3e1 in variant 1 and σ3=e3e1e3e3 in variant 2."""
    return build_split(
        [["e1", "e2", "e1", "e1"], ["e1", "e2", "e3", "e1"]],
        [["e3", "e1", "e3", "e3"]],
    )


def planted_spec_payload(
    seed: int = 7,
    exclusivity: float = 0.6,
    n_traces: int = 500,
    planted_durations: list | None = None,
) -> dict:
    """
    Two base sequences shared by both variants; (A, B) injected at position 2
    of variant-1 traces. (C, D) always opens a trace in both variants and
    serves as the frequency-and-position matched control edge.
    """
    return {
        "n_traces_per_variant": n_traces,
        "base_model": [
            {"activities": ["C", "D", "E", "A", "B", "F"], "weight": 1.0},
            {"activities": ["C", "D", "E", "F"], "weight": 1.0},
        ],
        "planted_edges": [
            {
                "edge": ["A", "B"],
                "exclusivity": exclusivity,
                "position": 2,
                "variant": 1,
            }
        ],
        "planted_durations": planted_durations or [],
        "seed": seed,
    }


@pytest.fixture
def planted_spec():
    """Factory for the planted (A, B) specification."""

    def _spec(**overrides) -> PlantSpec:
        return PlantSpec.model_validate(planted_spec_payload(**overrides))

    return _spec


@pytest.fixture(autouse=True)
def reset_package_loggers():
    """Undo handlers installed by CLI runs so caplog keeps working."""
    yield
    for name in (*PACKAGE_LOGGERS, "variant_fingerprint"):
        logger = logging.getLogger(name)
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()
        logger.setLevel(logging.NOTSET)
        logger.propagate = True
