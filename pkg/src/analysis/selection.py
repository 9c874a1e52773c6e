"""
Wrapper feature selection over candidate events or edges.

For every candidate unit the traces containing it are isolated, a kernel
classifier is cross-validated on the unit's wavelet coefficients alone, and
a one-sided t-test on the per-fold gains over the worst-case F1 decides
whether the unit discriminates the two variants.
"""

import hashlib
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace

import numpy as np

from src.analysis.classify import ClassifierConfig, FoldScore, cross_validate
from src.analysis.encoding import (
    AugmentedDesignMatrix,
    FeatureKind,
    FeatureUnit,
    build_augmented,
)
from src.analysis.stats import (
    benjamini_hochberg,
    format_p_value,
    t_test_one_sample_greater,
)
from src.config import Settings
from src.errors import ConfigurationError, FingerprintError, InsufficientDataError
from src.models.events import VariantSplit
from src.models.reports import CandidateRecord, SelectionReport

logger = logging.getLogger(__name__)

INSUFFICIENT_SUPPORT = "insufficient support"


@dataclass(frozen=True)
class SelectionConfig:
    """Parameters of a selection run."""

    alpha: float = 0.05
    k_folds: int = 10
    min_instances_per_class: int = 10
    feature_kind: FeatureKind = FeatureKind.EDGE
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    seed: int = 42
    fdr: bool = False
    threads: int = 1

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ConfigurationError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.k_folds < 2:
            raise ConfigurationError(f"k_folds must be >= 2, got {self.k_folds}")
        if self.min_instances_per_class < 2:
            raise ConfigurationError(
                f"min_instances_per_class must be >= 2, "
                f"got {self.min_instances_per_class}"
            )
        if self.threads < 1:
            raise ConfigurationError(f"threads must be >= 1, got {self.threads}")

    @classmethod
    def from_settings(cls, settings: Settings) -> "SelectionConfig":
        return cls(
            alpha=settings.selection.alpha,
            k_folds=settings.selection.k_folds,
            min_instances_per_class=settings.selection.min_instances_per_class,
            feature_kind=FeatureKind.from_option(settings.selection.features),
            classifier=ClassifierConfig.from_settings(
                settings.classifier, settings.seed
            ),
            seed=settings.seed,
            fdr=settings.selection.fdr,
            threads=settings.resolved_threads(),
        )


@dataclass(frozen=True)
class CandidateResult:
    """Outcome of evaluating one candidate unit."""

    unit: FeatureUnit
    n_instances1: int
    n_instances2: int
    mean_gamma1: float | None = None
    mean_gamma2: float | None = None
    mean_baseline_f1: float | None = None
    mean_weighted_f1: float | None = None
    p_value: float | None = None
    q_value: float | None = None
    discriminatory: bool = False
    skipped_reason: str | None = None
    exclusive_to: int | None = None
    k_folds_used: int | None = None
    folds: tuple[FoldScore, ...] = ()

    @property
    def skipped(self) -> bool:
        return self.skipped_reason is not None

    @property
    def mean_improvement(self) -> float | None:
        if self.mean_weighted_f1 is None or self.mean_baseline_f1 is None:
            return None
        return self.mean_weighted_f1 - self.mean_baseline_f1

    @property
    def dataset_gamma1(self) -> float | None:
        total = self.n_instances1 + self.n_instances2
        return self.n_instances1 / total if total else None

    @property
    def dataset_gamma2(self) -> float | None:
        total = self.n_instances1 + self.n_instances2
        return self.n_instances2 / total if total else None

    def to_record(self) -> CandidateRecord:
        return CandidateRecord(
            unit=self.unit.label,
            kind=self.unit.kind.value,
            gamma1=self.mean_gamma1,
            gamma2=self.mean_gamma2,
            baseline_f1=self.mean_baseline_f1,
            weighted_f1=self.mean_weighted_f1,
            p_value=self.p_value,
            p_value_display=format_p_value(self.p_value),
            q_value=self.q_value,
            discriminatory=self.discriminatory,
            exclusive_to=self.exclusive_to,
            n_instances1=self.n_instances1,
            n_instances2=self.n_instances2,
            dataset_gamma1=self.dataset_gamma1,
            dataset_gamma2=self.dataset_gamma2,
            k_folds_used=self.k_folds_used,
            skipped_reason=self.skipped_reason,
        )


def candidate_seed(seed: int, unit: FeatureUnit) -> int:
    """Seed owned by one candidate, independent of which others are evaluated."""
    digest = hashlib.sha256(f"{seed}|{unit.kind.value}|{unit.label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def instance_subset(
    aug: AugmentedDesignMatrix, unit: FeatureUnit
) -> tuple[np.ndarray, np.ndarray]:
    """
    Rows of the traces containing the unit, restricted to its coefficients.

    Returns:
        (rows, labels); both empty when no trace contains the unit
    """
    indices = aug.rows_containing(unit)
    return aug.unit_block(unit, indices), aug.labels[indices].copy()


def evaluate_candidate(
    aug: AugmentedDesignMatrix, unit: FeatureUnit, config: SelectionConfig
) -> CandidateResult:
    """
    Cross-validate the classifier on one unit and test for improvement.

    Units with too few containing traces in either variant are skipped;
    units found in one variant only are additionally marked exclusive to it.
    Failures inside the evaluation become a skipped_reason.
    """
    rows, labels = instance_subset(aug, unit)
    n1 = int(np.sum(labels == 1))
    n2 = int(np.sum(labels == 2))

    if n1 == 0 or n2 == 0:
        exclusive_to = 1 if n1 else (2 if n2 else None)
        return CandidateResult(
            unit, n1, n2, skipped_reason=INSUFFICIENT_SUPPORT, exclusive_to=exclusive_to
        )
    if min(n1, n2) < config.min_instances_per_class:
        return CandidateResult(unit, n1, n2, skipped_reason=INSUFFICIENT_SUPPORT)

    k = min(config.k_folds, n1, n2)
    classifier = replace(config.classifier, seed=candidate_seed(config.seed, unit))
    try:
        folds = cross_validate(rows, labels, k, classifier)
        diffs = [fold.improvement for fold in folds]
        test = t_test_one_sample_greater(diffs)
    except FingerprintError as e:
        logger.warning(f"Candidate {unit.label} skipped: {e}")
        return CandidateResult(unit, n1, n2, skipped_reason=str(e))

    mean_diff = float(np.mean(diffs))
    return CandidateResult(
        unit=unit,
        n_instances1=n1,
        n_instances2=n2,
        mean_gamma1=float(np.mean([fold.gamma1 for fold in folds])),
        mean_gamma2=float(np.mean([fold.gamma2 for fold in folds])),
        mean_baseline_f1=float(np.mean([fold.baseline_f1 for fold in folds])),
        mean_weighted_f1=float(np.mean([fold.weighted_f1 for fold in folds])),
        p_value=test.p_value,
        discriminatory=test.p_value < config.alpha and mean_diff > 0,
        k_folds_used=k,
        folds=tuple(folds),
    )


def _apply_fdr(results: list[CandidateResult], alpha: float) -> list[CandidateResult]:
    tested = [i for i, result in enumerate(results) if result.p_value is not None]
    q_values = benjamini_hochberg([results[i].p_value for i in tested])
    adjusted = list(results)
    for i, q in zip(tested, q_values):
        result = results[i]
        adjusted[i] = replace(
            result,
            q_value=q,
            discriminatory=q < alpha and (result.mean_improvement or 0.0) > 0,
        )
    return adjusted


def evaluate_all(
    aug: AugmentedDesignMatrix,
    units: Sequence[FeatureUnit],
    config: SelectionConfig,
    on_result: Callable[[int, int, CandidateResult], None] | None = None,
) -> list[CandidateResult]:
    """
    Evaluate every unit, in parallel when threads > 1.

    Returns:
        Results sorted by unit, identical for any thread count
    """
    if not units:
        raise InsufficientDataError("no candidate units to evaluate")

    aug.unit_index  # build the shared index before workers read it
    results: list[CandidateResult] = []
    with ThreadPoolExecutor(max_workers=config.threads) as executor:
        futures = [
            executor.submit(evaluate_candidate, aug, unit, config) for unit in units
        ]
        for done, future in enumerate(as_completed(futures), start=1):
            result = future.result()
            results.append(result)
            if on_result is not None:
                on_result(done, len(units), result)

    results.sort(key=lambda result: result.unit)
    if config.fdr:
        results = _apply_fdr(results, config.alpha)
    return results


def _log_progress(done: int, total: int, result: CandidateResult) -> None:
    if result.skipped:
        logger.info(
            f"[{done}/{total}] {result.unit.label}: skipped ({result.skipped_reason})"
        )
    else:
        logger.info(
            f"[{done}/{total}] {result.unit.label}: p={format_p_value(result.p_value)}"
            f"{' *' if result.discriminatory else ''}"
        )


def run_selection(
    split: VariantSplit,
    config: SelectionConfig,
    aug: AugmentedDesignMatrix | None = None,
) -> list[CandidateResult]:
    """
    Encode a split and evaluate every enumerated candidate unit.

    Raises:
        InsufficientDataError: The split has no candidate units
    """
    if aug is None:
        aug, units = build_augmented(split, config.feature_kind)
    else:
        units = list(aug.layout.units)
    logger.info(
        f"Evaluating {len(units):,} {config.feature_kind.value} candidates "
        f"(alpha={config.alpha}, k={config.k_folds}, threads={config.threads})"
    )
    results = evaluate_all(aug, units, config, on_result=_log_progress)
    summary = selection_summary(results)
    logger.info(
        f"Selection done: {summary['discriminatory']} discriminatory, "
        f"{summary['skipped']} skipped ({summary['exclusive']} exclusive) "
        f"of {summary['candidates']}"
    )
    return results


def discriminatory_units(results: Sequence[CandidateResult]) -> set[FeatureUnit]:
    return {result.unit for result in results if result.discriminatory}


def selection_summary(results: Sequence[CandidateResult]) -> dict[str, int]:
    return {
        "candidates": len(results),
        "tested": sum(1 for r in results if not r.skipped),
        "discriminatory": sum(1 for r in results if r.discriminatory),
        "skipped": sum(1 for r in results if r.skipped),
        "exclusive": sum(1 for r in results if r.exclusive_to is not None),
    }


def build_report(
    results: Sequence[CandidateResult], config: SelectionConfig
) -> SelectionReport:
    return SelectionReport(
        feature_kind=config.feature_kind.value,
        alpha=config.alpha,
        fdr=config.fdr,
        summary=selection_summary(results),
        candidates=[result.to_record() for result in results],
    )
