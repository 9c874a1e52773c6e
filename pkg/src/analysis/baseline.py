"""
Edge-frequency baseline.

Compares, per edge, the share of cases containing it in each variant with a
two-proportion z-test. Positions are ignored, so pure order or position
shifts go unnoticed.
"""

import logging
from collections import Counter
from dataclasses import dataclass

from src.analysis.encoding import FeatureUnit
from src.analysis.stats import format_p_value, two_proportion_z_test
from src.models.events import EventLog, VariantSplit
from src.models.reports import BaselineRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaselineRow:
    edge: FeatureUnit
    case_frequency1: int
    n1: int
    case_frequency2: int
    n2: int
    statistic: float
    p_value: float
    significant: bool

    def to_record(self) -> BaselineRecord:
        return BaselineRecord(
            edge=self.edge.label,
            case_frequency1=self.case_frequency1,
            n1=self.n1,
            case_frequency2=self.case_frequency2,
            n2=self.n2,
            statistic=self.statistic,
            p_value=self.p_value,
            p_value_display=format_p_value(self.p_value),
            significant=self.significant,
        )


def case_frequencies(log: EventLog) -> Counter[FeatureUnit]:
    """Number of traces containing each edge."""
    counts: Counter[FeatureUnit] = Counter()
    for trace in log:
        counts.update({FeatureUnit.edge(a, b) for a, b in trace.edges()})
    return counts


def edge_frequency_baseline(split: VariantSplit, alpha: float) -> list[BaselineRow]:
    """Two-proportion z-test on the case frequency of every edge, sorted by edge."""
    counts1 = case_frequencies(split.variant1)
    counts2 = case_frequencies(split.variant2)
    n1, n2 = len(split.variant1), len(split.variant2)

    rows = []
    for edge in sorted(set(counts1) | set(counts2)):
        test = two_proportion_z_test(counts1[edge], n1, counts2[edge], n2)
        rows.append(
            BaselineRow(
                edge=edge,
                case_frequency1=counts1[edge],
                n1=n1,
                case_frequency2=counts2[edge],
                n2=n2,
                statistic=test.statistic,
                p_value=test.p_value,
                significant=test.p_value < alpha,
            )
        )
    logger.info(
        f"Edge-frequency baseline: {sum(r.significant for r in rows)} of "
        f"{len(rows)} edges differ at alpha={alpha}"
    )
    return rows
