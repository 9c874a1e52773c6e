"""
Mutual fingerprints: directly-follows graphs of the traces that carry
discriminatory units, annotated with control-flow and duration differences.
"""

import io
import logging
from collections import Counter, defaultdict
from collections.abc import Collection, Iterable
from dataclasses import dataclass, replace
from enum import StrEnum

import numpy as np

from src.analysis.encoding import FeatureKind, FeatureUnit
from src.analysis.stats import format_p_value, welch_t_test
from src.errors import InsufficientDataError
from src.models.events import EventLog, Trace
from src.models.reports import (
    DurationRecord,
    FingerprintDocument,
    FingerprintEdgeRecord,
)

logger = logging.getLogger(__name__)

SECONDS_PER_DAY = 86400.0
ONE_VARIANT_ONLY = "edge occurs in one variant only"


class FingerprintFormat(StrEnum):
    DOT = "dot"
    JSON = "json"


@dataclass(frozen=True)
class FingerprintEdge:
    """A directly-follows edge with its annotations."""

    source: str
    target: str
    frequency: int
    case_frequency: int
    mean_duration_days: float
    cf_discriminatory: bool = False
    dur_discriminatory: bool = False

    @property
    def unit(self) -> FeatureUnit:
        return FeatureUnit.edge(self.source, self.target)


@dataclass(frozen=True)
class MutualFingerprint:
    """Directly-follows graph of one variant's retained traces."""

    variant_id: int
    nodes: tuple[str, ...]
    edges: tuple[FingerprintEdge, ...]
    retained_traces: int
    total_traces: int
    discriminatory_nodes: tuple[str, ...] = ()

    def edge(self, source: str, target: str) -> FingerprintEdge | None:
        for candidate in self.edges:
            if (candidate.source, candidate.target) == (source, target):
                return candidate
        return None

    @property
    def is_empty(self) -> bool:
        return not self.nodes


@dataclass(frozen=True)
class DurationSample:
    """Per-occurrence delays of one edge within one variant, in days."""

    edge: FeatureUnit
    variant_id: int
    deltas: tuple[float, ...]

    @property
    def mean(self) -> float | None:
        return float(np.mean(self.deltas)) if self.deltas else None


@dataclass(frozen=True)
class DurationComparison:
    """Welch comparison of one edge's delays across the two variants."""

    edge: FeatureUnit
    mean1_days: float | None
    mean2_days: float | None
    n1: int
    n2: int
    p_value: float | None = None
    dur_discriminatory: bool = False
    skipped_reason: str | None = None

    def to_record(self) -> DurationRecord:
        return DurationRecord(
            edge=self.edge.label,
            mean1_days=self.mean1_days,
            mean2_days=self.mean2_days,
            p_value=self.p_value,
            p_value_display=format_p_value(self.p_value),
            n1=self.n1,
            n2=self.n2,
            dur_discriminatory=self.dur_discriminatory,
            skipped_reason=self.skipped_reason,
        )


def contains_unit(trace: Trace, unit: FeatureUnit) -> bool:
    if unit.kind == FeatureKind.EVENT:
        return unit.symbols[0] in trace.activities
    return tuple(unit.symbols) in set(trace.edges())


def filter_traces(
    variant: EventLog, discriminatory: Collection[FeatureUnit]
) -> EventLog:
    """Keep the traces containing at least one discriminatory unit."""
    if not discriminatory:
        logger.warning("no differences found: nothing to retain")
        return EventLog(())

    events = {u.symbols[0] for u in discriminatory if u.kind == FeatureKind.EVENT}
    edges = {tuple(u.symbols) for u in discriminatory if u.kind == FeatureKind.EDGE}
    retained = tuple(
        trace
        for trace in variant
        if events.intersection(trace.activities) or edges.intersection(trace.edges())
    )
    return EventLog(retained)


def edge_deltas(trace: Trace) -> Iterable[tuple[tuple[str, str], float]]:
    """Every adjacent pair of a trace with its delay in fractional days."""
    for previous, current in zip(trace.events, trace.events[1:]):
        elapsed = current.timestamp - previous.timestamp
        delay = elapsed.total_seconds() / SECONDS_PER_DAY
        yield (previous.activity, current.activity), delay


def duration_samples(
    log: EventLog, variant_id: int
) -> dict[FeatureUnit, DurationSample]:
    """Delay samples of every edge in a log, one entry per occurrence."""
    collected: dict[tuple[str, str], list[float]] = defaultdict(list)
    for trace in log:
        for pair, delay in edge_deltas(trace):
            collected[pair].append(delay)
    return {
        FeatureUnit.edge(*pair): DurationSample(
            FeatureUnit.edge(*pair), variant_id, tuple(deltas)
        )
        for pair, deltas in collected.items()
    }


def build_dfg(
    filtered: EventLog, variant_id: int = 1, total_traces: int | None = None
) -> MutualFingerprint:
    """Directly-follows graph with occurrence and case frequencies."""
    frequency: Counter[tuple[str, str]] = Counter()
    case_frequency: Counter[tuple[str, str]] = Counter()
    delays: dict[tuple[str, str], list[float]] = defaultdict(list)
    nodes: set[str] = set()

    for trace in filtered:
        nodes.update(trace.activities)
        seen = set()
        for pair, delay in edge_deltas(trace):
            frequency[pair] += 1
            delays[pair].append(delay)
            seen.add(pair)
        case_frequency.update(seen)

    edges = tuple(
        FingerprintEdge(
            source=source,
            target=target,
            frequency=frequency[(source, target)],
            case_frequency=case_frequency[(source, target)],
            mean_duration_days=float(np.mean(delays[(source, target)])),
        )
        for source, target in sorted(frequency)
    )
    return MutualFingerprint(
        variant_id=variant_id,
        nodes=tuple(sorted(nodes)),
        edges=edges,
        retained_traces=len(filtered),
        total_traces=len(filtered) if total_traces is None else total_traces,
    )


def mark_control_flow(
    fp: MutualFingerprint, discriminatory: Collection[FeatureUnit]
) -> MutualFingerprint:
    """Flag discriminatory edges, and the nodes of discriminatory events."""
    flagged_edges = {u for u in discriminatory if u.kind == FeatureKind.EDGE}
    flagged_nodes = {
        u.symbols[0] for u in discriminatory if u.kind == FeatureKind.EVENT
    }
    return replace(
        fp,
        edges=tuple(
            replace(edge, cf_discriminatory=edge.unit in flagged_edges)
            for edge in fp.edges
        ),
        discriminatory_nodes=tuple(sorted(flagged_nodes.intersection(fp.nodes))),
    )


def compare_durations(
    variant1: EventLog, variant2: EventLog, alpha: float
) -> list[DurationComparison]:
    """
    Welch-test the delays of every edge of the full variants.

    Edges seen in one variant only, or with fewer than 2 delays on a side, are
    reported as skipped.
    """
    samples1 = duration_samples(variant1, 1)
    samples2 = duration_samples(variant2, 2)
    comparisons = []
    for edge in sorted(set(samples1) | set(samples2)):
        first, second = samples1.get(edge), samples2.get(edge)
        n1 = len(first.deltas) if first else 0
        n2 = len(second.deltas) if second else 0
        mean1 = first.mean if first else None
        mean2 = second.mean if second else None
        if first is None or second is None:
            comparisons.append(
                DurationComparison(
                    edge, mean1, mean2, n1, n2, skipped_reason=ONE_VARIANT_ONLY
                )
            )
            continue
        try:
            test = welch_t_test(first.deltas, second.deltas)
        except InsufficientDataError as e:
            comparisons.append(
                DurationComparison(edge, mean1, mean2, n1, n2, skipped_reason=str(e))
            )
            continue
        comparisons.append(
            DurationComparison(
                edge,
                mean1,
                mean2,
                n1,
                n2,
                p_value=test.p_value,
                dur_discriminatory=test.p_value < alpha,
            )
        )
    return comparisons


def annotate_durations(
    fp1: MutualFingerprint,
    fp2: MutualFingerprint,
    variant1: EventLog,
    variant2: EventLog,
    alpha: float,
) -> tuple[MutualFingerprint, MutualFingerprint, list[DurationComparison]]:
    """Mark duration-different edges identically in both fingerprints."""
    comparisons = compare_durations(variant1, variant2, alpha)
    flagged = {c.edge for c in comparisons if c.dur_discriminatory}

    def mark(fp: MutualFingerprint) -> MutualFingerprint:
        return replace(
            fp,
            edges=tuple(
                replace(edge, dur_discriminatory=edge.unit in flagged)
                for edge in fp.edges
            ),
        )

    logger.info(
        f"Duration comparison: {len(flagged)} of {len(comparisons)} edges differ "
        f"at alpha={alpha}"
    )
    return mark(fp1), mark(fp2), comparisons


def build_fingerprints(
    variant1: EventLog,
    variant2: EventLog,
    discriminatory: Collection[FeatureUnit],
    alpha: float,
) -> tuple[MutualFingerprint, MutualFingerprint, list[DurationComparison]]:
    """Filter, build and annotate the fingerprints of both variants."""
    fingerprints = []
    for variant_id, variant in ((1, variant1), (2, variant2)):
        retained = filter_traces(variant, discriminatory)
        fp = build_dfg(retained, variant_id=variant_id, total_traces=len(variant))
        fingerprints.append(mark_control_flow(fp, discriminatory))
        logger.info(
            f"Fingerprint of variant {variant_id}: {fp.retained_traces:,} of "
            f"{fp.total_traces:,} traces, {len(fp.nodes)} nodes, {len(fp.edges)} edges"
        )
    return annotate_durations(
        fingerprints[0], fingerprints[1], variant1, variant2, alpha
    )


def _quote(identifier: str) -> str:
    escaped = identifier.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def emit_dot(fp: MutualFingerprint) -> bytes:
    """Graphviz rendering: red edges differ in control flow, dashed in duration."""
    output = io.StringIO()
    output.write(f"digraph {_quote(f'variant{fp.variant_id}')} {{\n")
    output.write("  rankdir=LR;\n")
    output.write('  node [shape="box"];\n')
    flagged_nodes = set(fp.discriminatory_nodes)
    for node in fp.nodes:
        attributes = ' [color="red"]' if node in flagged_nodes else ""
        output.write(f"  {_quote(node)}{attributes};\n")
    for edge in fp.edges:
        attributes = [f'label="{edge.frequency} / {edge.mean_duration_days:.2f} d"']
        if edge.cf_discriminatory:
            attributes.append('color="red"')
        if edge.dur_discriminatory:
            attributes.append('style="dashed"')
        output.write(
            f"  {_quote(edge.source)} -> {_quote(edge.target)} "
            f"[{', '.join(attributes)}];\n"
        )
    output.write("}\n")
    return output.getvalue().encode("utf-8")


def to_document(fp: MutualFingerprint) -> FingerprintDocument:
    return FingerprintDocument(
        variant_id=fp.variant_id,
        nodes=list(fp.nodes),
        discriminatory_nodes=list(fp.discriminatory_nodes),
        edges=[
            FingerprintEdgeRecord(
                source=edge.source,
                target=edge.target,
                frequency=edge.frequency,
                case_frequency=edge.case_frequency,
                mean_duration_days=edge.mean_duration_days,
                cf_discriminatory=edge.cf_discriminatory,
                dur_discriminatory=edge.dur_discriminatory,
            )
            for edge in fp.edges
        ],
        retained_traces=fp.retained_traces,
        total_traces=fp.total_traces,
    )


def emit(fp: MutualFingerprint, fmt: FingerprintFormat | str) -> bytes:
    """Serialize a fingerprint as DOT or versioned JSON."""
    if FingerprintFormat(fmt) == FingerprintFormat.DOT:
        return emit_dot(fp)
    return (to_document(fp).model_dump_json(indent=2) + "\n").encode("utf-8")
