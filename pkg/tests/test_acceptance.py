"""
Acceptance tests over many seeded synthetic logs.

These runs take minutes and are marked slow; run them with
`python run_tests.py --acceptance` or `pytest -m acceptance`.

The road-traffic-fine check needs the public log on disk and only runs when
FINGERPRINT_RTFM_LOG points at it.
"""

import os
from pathlib import Path

import pytest

from src.analysis.encoding import FeatureUnit
from src.analysis.fingerprint import compare_durations
from src.analysis.selection import SelectionConfig, discriminatory_units, run_selection
from src.models.synth import PlantSpec
from src.parsers.variants import parse_split_rule, split_variants
from src.parsers.xes import parse_xes
from src.synth.generator import generate, split_in_halves
from tests.conftest import planted_spec_payload

AB = FeatureUnit.edge("A", "B")
CD = FeatureUnit.edge("C", "D")
SEEDS = range(1, 21)

pytestmark = [pytest.mark.slow, pytest.mark.acceptance]


def homogeneous_spec(seed: int) -> PlantSpec:
    """One process with several paths and no planted differences."""
    return PlantSpec.model_validate(
        {
            "n_traces_per_variant": 250,
            "base_model": [
                {"activities": ["C", "D", "E", "F"], "weight": 2.0},
                {"activities": ["C", "D", "E", "A", "B", "F"], "weight": 1.0},
                {"activities": ["C", "E", "D", "F"], "weight": 1.0},
                {"activities": ["C", "D", "D", "E", "F"], "weight": 0.5},
            ],
            "seed": seed,
        }
    )


def duration_spec(seed: int, mean2: float) -> PlantSpec:
    payload = planted_spec_payload(
        seed=seed,
        n_traces=200,
        planted_durations=[
            {"edge": ["C", "D"], "mean1": 10.0, "mean2": mean2, "sd": 1.0}
        ],
    )
    return PlantSpec.model_validate(payload)


def duration_p_value(seed: int, mean2: float) -> float:
    logs = generate(duration_spec(seed, mean2))
    comparisons = compare_durations(logs.variant1, logs.variant2, alpha=0.05)
    return next(c.p_value for c in comparisons if c.edge == CD)


class TestPlantedRecovery:
    """Planted edge found, matched control edge left alone."""

    @pytest.fixture(scope="class")
    def runs(self):
        config = SelectionConfig(threads=os.cpu_count() or 1)
        results = []
        for seed in SEEDS:
            logs = generate(PlantSpec.model_validate(planted_spec_payload(seed=seed)))
            by_unit = {r.unit: r for r in run_selection(logs.as_split(), config)}
            results.append(by_unit)
        return results

    def test_planted_edge_recovered(self, runs):
        detected = sum(
            run[AB].discriminatory and run[AB].p_value < 0.05 for run in runs
        )
        assert detected >= 18

    def test_control_edge_rarely_flagged(self, runs):
        assert sum(run[CD].discriminatory for run in runs) <= 3

    def test_no_exclusivity_no_detection(self):
        logs = generate(PlantSpec.model_validate(planted_spec_payload(exclusivity=0.0)))
        results = run_selection(logs.as_split(), SelectionConfig())
        assert AB not in discriminatory_units(results)


class TestDetectionRateMonotone:
    """A stronger planted signal never lowers the detection rate."""

    EXCLUSIVITIES = (0.2, 0.4, 0.6, 0.8)

    @pytest.fixture(scope="class")
    def detections(self):
        config = SelectionConfig(threads=os.cpu_count() or 1)
        counts = []
        for exclusivity in self.EXCLUSIVITIES:
            detected = 0
            for seed in SEEDS:
                payload = planted_spec_payload(seed=seed, exclusivity=exclusivity)
                logs = generate(PlantSpec.model_validate(payload))
                results = run_selection(logs.as_split(), config)
                detected += AB in discriminatory_units(results)
            counts.append(detected)
        return counts

    def test_detection_rate_non_decreasing(self, detections):
        assert detections == sorted(detections)


class TestNullCalibration:
    """Random halves of one log should not differ."""

    def test_halves_yield_nothing(self):
        config = SelectionConfig(threads=os.cpu_count() or 1)
        empty = 0
        for seed in SEEDS:
            logs = generate(homogeneous_spec(seed))
            split = split_in_halves(logs.merged(), seed=seed)
            empty += not discriminatory_units(run_selection(split, config))
        assert empty >= 18


class TestDurationDetection:
    """Planted delay shifts are found; equal delays are not."""

    def test_shift_detected(self):
        assert duration_p_value(seed=1, mean2=12.0) < 1e-6

    def test_equal_means_not_detected(self):
        quiet = sum(duration_p_value(seed, mean2=10.0) > 0.05 for seed in SEEDS)
        assert quiet >= 18


@pytest.mark.rtfm
@pytest.mark.skipif(
    not os.environ.get("FINGERPRINT_RTFM_LOG"),
    reason="FINGERPRINT_RTFM_LOG not set",
)
class TestRoadTrafficFines:
    """Full-data check on the road traffic fine management log."""

    @pytest.fixture(scope="class")
    def split(self):
        with open(Path(os.environ["FINGERPRINT_RTFM_LOG"]), "rb") as handle:
            log = parse_xes(handle)
        return split_variants(log, "amount", parse_split_rule("ge:50,lt:50"))

    def test_variant_sizes(self, split):
        assert (len(split.variant1), len(split.variant2)) == (21_243, 129_127)

    def test_known_edges_discriminatory(self, split):
        config = SelectionConfig(threads=os.cpu_count() or 1)
        found = discriminatory_units(run_selection(split, config))

        assert {
            FeatureUnit.edge("Add penalty", "Payment"),
            FeatureUnit.edge("Payment", "Payment"),
            FeatureUnit.edge("Payment", "Send for Credit Collection"),
        } <= found

    def test_penalty_payment_delays(self, split):
        comparisons = compare_durations(split.variant1, split.variant2, alpha=0.05)
        edge = FeatureUnit.edge("Add penalty", "Payment")
        comparison = next(c for c in comparisons if c.edge == edge)

        assert comparison.mean1_days == pytest.approx(152.38, rel=0.05)
        assert comparison.mean2_days == pytest.approx(169.43, rel=0.05)
        assert comparison.mean1_days < comparison.mean2_days
        assert comparison.p_value < 0.05

