"""
Split an event log into two process variants by an attribute predicate.
"""

import logging

import numpy as np

from src.errors import ConfigurationError, DegenerateSplitError
from src.models.events import EventLog, Operator, Predicate, SplitRule, VariantSplit
from src.models.reports import VariantSummary
from src.parsers.csv_log import coerce_scalar

logger = logging.getLogger(__name__)


def _parse_predicate(text: str) -> Predicate:
    op_text, separator, value_text = text.strip().partition(":")
    if not separator or value_text == "":
        raise ConfigurationError(
            f"Invalid predicate '{text}': expected '<op>:<value>', e.g. 'ge:50'"
        )
    try:
        op = Operator(op_text.strip().lower())
    except ValueError:
        valid = ", ".join(o.value for o in Operator)
        raise ConfigurationError(
            f"Unknown operator '{op_text}' in '{text}' (valid: {valid})"
        )
    value = coerce_scalar(value_text.strip())
    return Predicate(op=op, value=value if value is not None else value_text)


def parse_split_rule(text: str) -> SplitRule:
    """
    Parse a split rule such as "ge:50,lt:50" or "eq:A,eq:B".

    Raises:
        ConfigurationError: Not exactly two well-formed predicates
    """
    parts = [part for part in text.split(",") if part.strip()]
    if len(parts) != 2:
        raise ConfigurationError(
            f"Split rule '{text}' must contain exactly two predicates"
        )
    first, second = (_parse_predicate(part) for part in parts)
    if first == second:
        raise ConfigurationError(f"Split rule '{text}' uses the same predicate twice")
    return SplitRule(first=first, second=second)


def split_variants(log: EventLog, attribute: str, rule: SplitRule) -> VariantSplit:
    """
    Partition a log into two variants.

    The attribute is resolved from the case attributes first, else from the
    first event carrying it. Traces matching neither predicate, or lacking the
    attribute, are dropped and counted.

    Raises:
        ConfigurationError: Attribute absent from every trace, or a value
            satisfying both predicates
        DegenerateSplitError: One of the variants ends up empty
    """
    variant1, variant2 = [], []
    dropped = 0
    missing = 0

    for trace in log:
        value = trace.attribute(attribute)
        if value is None:
            missing += 1
            continue
        target = rule.classify(value)
        if target == 1:
            variant1.append(trace)
        elif target == 2:
            variant2.append(trace)
        else:
            dropped += 1

    if missing == len(log):
        raise ConfigurationError(f"Attribute '{attribute}' is absent from every trace")
    if not variant1 or not variant2:
        raise DegenerateSplitError(
            f"degenerate split: {len(variant1)} traces in variant 1, "
            f"{len(variant2)} in variant 2 for rule {rule.describe(attribute)}"
        )

    split = VariantSplit(
        variant1=EventLog(tuple(variant1)),
        variant2=EventLog(tuple(variant2)),
        predicate_description=rule.describe(attribute),
        dropped=dropped + missing,
        missing_attribute=missing,
    )
    logger.info(
        f"Split on {split.predicate_description}: {len(split.variant1):,} / "
        f"{len(split.variant2):,} traces, {split.dropped:,} dropped "
        f"({missing:,} without the attribute)"
    )
    return split


def summarize(log: EventLog, label: str = "") -> VariantSummary:
    """Descriptive statistics of one variant."""
    lengths = [len(trace) for trace in log]
    return VariantSummary(
        label=label,
        cases=len(log),
        distinct_sequences=len({trace.activities for trace in log}),
        min_trace_len=min(lengths, default=0),
        max_trace_len=max(lengths, default=0),
        avg_trace_len=float(np.mean(lengths)) if lengths else 0.0,
        events=sum(lengths),
        distinct_activities=len(log.alphabet),
    )
