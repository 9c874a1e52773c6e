"""
Deterministic synthetic two-variant event logs with planted differences.

Both variants draw their activity sequences from one shared base model.
Planted edges are injected into one variant only; planted durations give an
edge different delay distributions per variant. All randomness comes from a
single numpy Generator seeded by the spec, so a spec fully determines the
output.
"""

import logging
from dataclasses import dataclass
from datetime import timedelta

import numpy as np

from src.errors import ConfigurationError
from src.models.events import Event, EventLog, Trace, VariantSplit
from src.models.synth import Edge, GroundTruth, PlantSpec

logger = logging.getLogger(__name__)

MAX_REJECTIONS = 1000


@dataclass(frozen=True)
class SyntheticLogs:
    """Generated variants and the ground truth describing them."""

    variant1: EventLog
    variant2: EventLog
    truth: GroundTruth

    def merged(self) -> EventLog:
        """Both variants in one log, told apart by the variant case attribute."""
        return EventLog(self.variant1.traces + self.variant2.traces)

    def as_split(self) -> VariantSplit:
        return VariantSplit(
            variant1=self.variant1,
            variant2=self.variant2,
            predicate_description="synthetic variant 1 | synthetic variant 2",
        )


def truncated_normal(rng: np.random.Generator, mean: float, sd: float) -> float:
    """Normal draw rejected until non-negative."""
    for _ in range(MAX_REJECTIONS):
        value = rng.normal(mean, sd)
        if value >= 0:
            return float(value)
    return 0.0


class LogGenerator:
    """Generate the two variants of a PlantSpec."""

    def __init__(self, spec: PlantSpec):
        self.spec = spec
        self.rng = np.random.default_rng(spec.seed)
        weights = np.array([s.weight for s in spec.base_model], dtype=np.float64)
        self.probabilities = weights / weights.sum()
        self.durations = {tuple(d.edge): d for d in spec.planted_durations}
        self.seams: set[Edge] = set()
        self.shifted: set[Edge] = set()

    def _sequence(self, variant_id: int) -> list[str]:
        index = int(self.rng.choice(len(self.spec.base_model), p=self.probabilities))
        activities = list(self.spec.base_model[index].activities)
        for planted in self.spec.planted_edges:
            if planted.variant != variant_id:
                continue
            if self.rng.random() >= planted.exclusivity:
                continue
            position = min(planted.position, len(activities))
            source, target = planted.edge
            self.shifted.update(zip(activities[position:], activities[position + 1 :]))
            if position > 0:
                self.seams.add((activities[position - 1], source))
            if position < len(activities):
                self.seams.add((target, activities[position]))
            activities[position:position] = [source, target]
        return activities

    def _delay(self, pair: tuple[str, str], variant_id: int) -> float:
        planted = self.durations.get(pair)
        if planted is None:
            return truncated_normal(
                self.rng, self.spec.default_delay_mean, self.spec.default_delay_sd
            )
        mean = planted.mean1 if variant_id == 1 else planted.mean2
        return truncated_normal(self.rng, mean, planted.sd)

    def _trace(self, variant_id: int, number: int) -> Trace:
        case_id = f"v{variant_id}_case_{number:04d}"
        activities = self._sequence(variant_id)
        instant = self.spec.start + timedelta(days=float(self.rng.uniform(0, 30)))
        events = [Event(activities[0], case_id, instant)]
        for previous, activity in zip(activities, activities[1:]):
            delay = self._delay((previous, activity), variant_id)
            instant = instant + timedelta(days=delay)
            events.append(Event(activity, case_id, instant))
        return Trace(
            case_id,
            tuple(events),
            {self.spec.variant_attribute: variant_id},
        )

    def _variant(self, variant_id: int) -> EventLog:
        return EventLog(
            tuple(
                self._trace(variant_id, number)
                for number in range(1, self.spec.n_traces_per_variant + 1)
            )
        )

    def generate(self) -> SyntheticLogs:
        variant1 = self._variant(1)
        variant2 = self._variant(2)

        planted = {tuple(p.edge) for p in self.spec.planted_edges if p.exclusivity > 0}
        truth = GroundTruth(
            seed=self.spec.seed,
            n_traces={"variant1": len(variant1), "variant2": len(variant2)},
            control_flow_different=sorted(planted | self.seams | self.shifted),
            seam_edges=sorted(self.seams - planted),
            shifted_edges=sorted(self.shifted - planted),
            duration_different=sorted(
                tuple(d.edge) for d in self.spec.planted_durations if d.mean1 != d.mean2
            ),
        )
        logger.info(
            f"Generated {len(variant1):,} + {len(variant2):,} synthetic traces "
            f"(seed {self.spec.seed}, {len(truth.control_flow_different)} control-flow "
            f"and {len(truth.duration_different)} duration differences planted)"
        )
        return SyntheticLogs(variant1, variant2, truth)


def generate(spec: PlantSpec) -> SyntheticLogs:
    """Generate two variants and their ground truth from a spec."""
    return LogGenerator(spec).generate()


def split_in_halves(log: EventLog, seed: int) -> VariantSplit:
    """
    Randomly partition one log into two halves of (almost) equal size.

    Both halves come from the same process, so any difference found between
    them is a false positive.

    Raises:
        ConfigurationError: The log has fewer than 2 traces
    """
    if len(log) < 2:
        raise ConfigurationError("Need at least 2 traces to split a log in halves")
    order = np.random.default_rng(seed).permutation(len(log))
    middle = len(log) // 2
    first = tuple(log.traces[i] for i in sorted(order[:middle]))
    second = tuple(log.traces[i] for i in sorted(order[middle:]))
    return VariantSplit(
        variant1=EventLog(first),
        variant2=EventLog(second),
        predicate_description=f"random half {seed} | complement",
    )
