"""
Hypothesis tests used by feature selection, duration comparison and the
edge-frequency baseline.

The Student t distribution is evaluated through the regularized incomplete
beta function: for x >= 0 the upper tail is ½·I(ν/(ν+x²); ν/2, ½).
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy import special
from scipy.stats import false_discovery_control

from src.errors import InsufficientDataError, StatisticsError

P_VALUE_FLOOR = 1e-16


class Alternative(StrEnum):
    GREATER = "greater"
    TWO_SIDED = "two-sided"


@dataclass(frozen=True)
class TestResult:
    """Outcome of a single hypothesis test."""

    __test__ = False

    statistic: float
    dof: float
    p_value: float
    alternative: Alternative


def _check_dof(dof: float) -> None:
    if not dof > 0:
        raise StatisticsError(f"Degrees of freedom must be positive, got {dof}")


def _upper_tail_abs(x: float, dof: float) -> float:
    """P(T > |x|)."""
    if math.isinf(x):
        return 0.0
    return 0.5 * float(special.betainc(dof / 2.0, 0.5, dof / (dof + x * x)))


def t_cdf(x: float, dof: float) -> float:
    """Cumulative distribution function of Student's t."""
    _check_dof(dof)
    tail = _upper_tail_abs(x, dof)
    return 1.0 - tail if x > 0 else tail


def t_sf(x: float, dof: float) -> float:
    """Survival function P(T > x), accurate far into the upper tail."""
    _check_dof(dof)
    tail = _upper_tail_abs(x, dof)
    return tail if x > 0 else 1.0 - tail


def t_test_one_sample_greater(diffs: Sequence[float]) -> TestResult:
    """
    One-sided one-sample t-test of H1: mean(diffs) > 0.

    A zero standard deviation gives p = 0 for a positive mean and p = 1
    otherwise.

    Raises:
        InsufficientDataError: Fewer than 2 values
    """
    values = np.asarray(diffs, dtype=np.float64)
    n = len(values)
    if n < 2:
        raise InsufficientDataError(f"One-sample t-test needs >= 2 values, got {n}")

    mean = float(values.mean())
    sd = float(values.std(ddof=1))
    dof = float(n - 1)
    if sd <= 1e-15 * max(1.0, abs(mean)):
        if mean > 0:
            return TestResult(math.inf, dof, 0.0, Alternative.GREATER)
        statistic = -math.inf if mean < 0 else 0.0
        return TestResult(statistic, dof, 1.0, Alternative.GREATER)

    statistic = mean / (sd / math.sqrt(n))
    return TestResult(statistic, dof, t_sf(statistic, dof), Alternative.GREATER)


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """
    Two-sided Welch test for a difference in means with unequal variances.

    When both samples have zero variance the test degenerates: equal means
    give p = 1, different means p = 0.

    Raises:
        InsufficientDataError: Either sample has fewer than 2 values
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if len(x) < 2 or len(y) < 2:
        raise InsufficientDataError(
            f"insufficient duration observations ({len(x)} vs {len(y)})"
        )

    va = float(x.var(ddof=1)) / len(x)
    vb = float(y.var(ddof=1)) / len(y)
    se2 = va + vb
    difference = float(x.mean() - y.mean())

    if se2 == 0:
        dof = float(len(x) + len(y) - 2)
        if difference == 0:
            return TestResult(0.0, dof, 1.0, Alternative.TWO_SIDED)
        statistic = math.copysign(math.inf, difference)
        return TestResult(statistic, dof, 0.0, Alternative.TWO_SIDED)

    dof = se2**2 / (va**2 / (len(x) - 1) + vb**2 / (len(y) - 1))
    statistic = difference / math.sqrt(se2)
    p_value = min(1.0, 2.0 * _upper_tail_abs(statistic, dof))
    return TestResult(statistic, dof, p_value, Alternative.TWO_SIDED)


def two_proportion_z_test(k1: int, n1: int, k2: int, n2: int) -> TestResult:
    """Two-sided pooled z-test for k1/n1 versus k2/n2."""
    if n1 <= 0 or n2 <= 0:
        raise StatisticsError(f"Sample sizes must be positive, got {n1}, {n2}")
    if not (0 <= k1 <= n1 and 0 <= k2 <= n2):
        raise StatisticsError(f"Counts out of range: {k1}/{n1}, {k2}/{n2}")

    pooled = (k1 + k2) / (n1 + n2)
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    if se == 0:
        return TestResult(0.0, math.inf, 1.0, Alternative.TWO_SIDED)
    z = (k1 / n1 - k2 / n2) / se
    p_value = float(2.0 * special.ndtr(-abs(z)))
    return TestResult(z, math.inf, min(1.0, p_value), Alternative.TWO_SIDED)


def benjamini_hochberg(p_values: Sequence[float]) -> list[float]:
    """Benjamini-Hochberg adjusted p-values, in input order."""
    if len(p_values) == 0:
        return []
    adjusted = false_discovery_control(
        np.asarray(p_values, dtype=np.float64), method="bh"
    )
    return [float(q) for q in adjusted]


def format_p_value(p_value: float | None) -> str:
    """Render a p-value; anything below the floor prints as '<1e-16'."""
    if p_value is None or math.isnan(p_value):
        return ""
    if p_value < P_VALUE_FLOOR:
        return f"<{P_VALUE_FLOOR:.0e}"
    return f"{p_value:.6g}"
