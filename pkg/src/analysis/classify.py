"""
Binary RBF-kernel support vector classifier, stratified sampling and
cross-validated weighted-F1 scoring.

The classifier solves the soft-margin dual with sequential minimal
optimization, choosing each working pair by maximal violation plus
second-order gain. Duplicate training rows are merged into one row whose
box constraint is scaled by its multiplicity, which leaves the optimum
unchanged and makes training independent of row order.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy.spatial.distance import cdist

from src.config import ClassifierSettings
from src.errors import (
    ConfigurationError,
    DegenerateTrainingSetError,
    DimensionError,
    InsufficientDataError,
)

logger = logging.getLogger(__name__)

TAU = 1e-12
CLASS_LABELS = (1, 2)


@dataclass(frozen=True)
class ClassifierConfig:
    """Hyperparameters of the kernel classifier."""

    C: float = 1.0
    kernel_gamma: float | str = "scale"
    tol: float = 1e-3
    max_passes: int = 100
    seed: int = 42

    def __post_init__(self):
        if self.C <= 0:
            raise ConfigurationError(f"C must be positive, got {self.C}")
        if self.kernel_gamma != "scale":
            if not isinstance(self.kernel_gamma, int | float) or self.kernel_gamma <= 0:
                raise ConfigurationError(
                    f"kernel_gamma must be 'scale' or a positive number, "
                    f"got {self.kernel_gamma!r}"
                )
        if self.tol <= 0:
            raise ConfigurationError(f"tol must be positive, got {self.tol}")
        if self.max_passes < 1:
            raise ConfigurationError(f"max_passes must be >= 1, got {self.max_passes}")

    @classmethod
    def from_settings(
        cls, settings: ClassifierSettings, seed: int
    ) -> "ClassifierConfig":
        gamma = settings.gamma if settings.gamma == "scale" else float(settings.gamma)
        return cls(
            C=settings.C,
            kernel_gamma=gamma,
            tol=settings.tol,
            max_passes=settings.max_passes,
            seed=seed,
        )

    def resolve_gamma(self, rows: np.ndarray) -> float:
        """Fixed gamma, or 1 / (n_features · variance of all entries)."""
        if self.kernel_gamma != "scale":
            return float(self.kernel_gamma)
        variance = float(rows.var()) if rows.size else 0.0
        if variance <= 0:
            return 1.0
        return 1.0 / (rows.shape[1] * variance)


class Classifier(Protocol):
    """Anything that maps feature rows to labels in {1, 2}."""

    def predict(self, rows: np.ndarray) -> np.ndarray: ...


Trainer = Callable[[np.ndarray, np.ndarray, ClassifierConfig], Classifier]


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * cdist(a, b, metric="sqeuclidean"))


@dataclass(frozen=True, eq=False)
class KernelSVM:
    """Trained decision function f(x) = Σ αᵢ yᵢ k(xᵢ, x) − ρ."""

    support_vectors: np.ndarray
    dual_coef: np.ndarray
    rho: float
    gamma: float
    iterations: int
    converged: bool

    def decision_function(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != self.support_vectors.shape[1]:
            raise DimensionError(
                f"Expected rows with {self.support_vectors.shape[1]} features, "
                f"got shape {rows.shape}"
            )
        if len(self.support_vectors) == 0:
            return np.full(len(rows), -self.rho)
        kernel = rbf_kernel(rows, self.support_vectors, self.gamma)
        return kernel @ self.dual_coef - self.rho

    def predict(self, rows: np.ndarray) -> np.ndarray:
        """Class 1 where the decision value is positive, class 2 elsewhere."""
        return np.where(self.decision_function(rows) > 0, 1, 2).astype(np.int8)


def _validate_training_set(rows: np.ndarray, labels: np.ndarray) -> None:
    if rows.ndim != 2:
        raise DimensionError(f"Training rows must be a matrix, got shape {rows.shape}")
    if len(rows) != len(labels):
        raise DimensionError(f"{len(rows)} rows but {len(labels)} labels")
    if not np.all(np.isin(labels, CLASS_LABELS)):
        raise ConfigurationError("Labels must be 1 or 2")
    if np.isnan(rows).any():
        raise ConfigurationError("Training rows contain NaN")
    present = set(np.unique(labels).tolist())
    if present != set(CLASS_LABELS):
        raise DegenerateTrainingSetError(
            f"degenerate training set: only class(es) {sorted(present)} present"
        )


def _select_pair(
    y: np.ndarray,
    alpha: np.ndarray,
    G: np.ndarray,
    K: np.ndarray,
    bounds: np.ndarray,
    tol: float,
) -> tuple[int, int] | None:
    """Most violating i, then the j with the best second-order gain."""
    minus_yG = -y * G
    positive = y > 0
    below = alpha < bounds
    above = alpha > 0
    up = (positive & below) | (~positive & above)
    low = (positive & above) | (~positive & below)
    if not up.any() or not low.any():
        return None

    up_scores = np.where(up, minus_yG, -np.inf)
    i = int(np.argmax(up_scores))
    m = up_scores[i]
    if m - np.min(np.where(low, minus_yG, np.inf)) < tol:
        return None

    candidates = low & (minus_yG < m)
    gain = m - minus_yG
    curvature = K[i, i] + np.diag(K) - 2.0 * K[i]
    curvature = np.where(curvature > 0, curvature, TAU)
    objective = np.where(candidates, -(gain**2) / curvature, np.inf)
    j = int(np.argmin(objective))
    if not np.isfinite(objective[j]):
        return None
    return i, j


def _update_pair(
    i: int,
    j: int,
    y: np.ndarray,
    alpha: np.ndarray,
    G: np.ndarray,
    K: np.ndarray,
    bounds: np.ndarray,
) -> tuple[float, float]:
    """Analytic two-variable step clipped to the box; returns the alpha deltas."""
    C_i, C_j = bounds[i], bounds[j]
    old_i, old_j = alpha[i], alpha[j]
    quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
    if quad <= 0:
        quad = TAU

    if y[i] != y[j]:
        delta = (-G[i] - G[j]) / quad
        diff = old_i - old_j
        a_i, a_j = old_i + delta, old_j + delta
        if diff > 0:
            if a_j < 0:
                a_j, a_i = 0.0, diff
        elif a_i < 0:
            a_i, a_j = 0.0, -diff
        if diff > C_i - C_j:
            if a_i > C_i:
                a_i, a_j = C_i, C_i - diff
        elif a_j > C_j:
            a_j, a_i = C_j, C_j + diff
    else:
        delta = (G[i] - G[j]) / quad
        total = old_i + old_j
        a_i, a_j = old_i - delta, old_j + delta
        if total > C_i:
            if a_i > C_i:
                a_i, a_j = C_i, total - C_i
        elif a_j < 0:
            a_j, a_i = 0.0, total
        if total > C_j:
            if a_j > C_j:
                a_j, a_i = C_j, total - C_j
        elif a_i < 0:
            a_i, a_j = 0.0, total

    alpha[i], alpha[j] = a_i, a_j
    return a_i - old_i, a_j - old_j


def _offset(
    y: np.ndarray, alpha: np.ndarray, G: np.ndarray, bounds: np.ndarray
) -> float:
    yG = y * G
    at_upper = alpha >= bounds
    at_lower = alpha <= 0
    free = ~at_upper & ~at_lower
    if free.any():
        return float(yG[free].mean())

    positive = y > 0
    ub_mask = (at_upper & ~positive) | (at_lower & positive)
    lb_mask = (at_upper & positive) | (at_lower & ~positive)
    ub = yG[ub_mask].min() if ub_mask.any() else None
    lb = yG[lb_mask].max() if lb_mask.any() else None
    if ub is None and lb is None:
        return 0.0
    if ub is None:
        return float(lb)
    if lb is None:
        return float(ub)
    return float((ub + lb) / 2.0)


def train(rows: np.ndarray, labels: np.ndarray, config: ClassifierConfig) -> KernelSVM:
    """
    Train the soft-margin RBF classifier.

    Args:
        rows: (n × features) training matrix
        labels: Class labels in {1, 2}
        config: Hyperparameters

    Returns:
        A KernelSVM holding only the support vectors

    Raises:
        DegenerateTrainingSetError: Only one class present
    """
    rows = np.asarray(rows, dtype=np.float64)
    labels = np.asarray(labels)
    _validate_training_set(rows, labels)

    gamma = config.resolve_gamma(rows)
    labelled = np.column_stack([rows, labels.astype(np.float64)])
    unique, counts = np.unique(labelled, axis=0, return_counts=True)
    X = unique[:, :-1]
    y = np.where(unique[:, -1] == 1, 1.0, -1.0)
    bounds = config.C * counts.astype(np.float64)

    n = len(X)
    K = rbf_kernel(X, X, gamma)
    Q = np.outer(y, y) * K
    alpha = np.zeros(n)
    G = -np.ones(n)

    max_iterations = config.max_passes * n
    iterations = 0
    converged = False
    while iterations < max_iterations:
        pair = _select_pair(y, alpha, G, K, bounds, config.tol)
        if pair is None:
            converged = True
            break
        i, j = pair
        delta_i, delta_j = _update_pair(i, j, y, alpha, G, K, bounds)
        G += Q[:, i] * delta_i + Q[:, j] * delta_j
        iterations += 1

    if not converged:
        logger.warning(
            f"Solver stopped at the iteration cap ({max_iterations:,}) before "
            f"reaching tolerance {config.tol}"
        )

    support = alpha > 0
    return KernelSVM(
        support_vectors=X[support],
        dual_coef=(alpha * y)[support],
        rho=_offset(y, alpha, G, bounds),
        gamma=gamma,
        iterations=iterations,
        converged=converged,
    )


def f1_for_class(y_true: np.ndarray, y_pred: np.ndarray, positive: int) -> float:
    """F1 of one class; 0 when it has neither true nor predicted members."""
    tp = int(np.sum((y_true == positive) & (y_pred == positive)))
    fp = int(np.sum((y_true != positive) & (y_pred == positive)))
    fn = int(np.sum((y_true == positive) & (y_pred != positive)))
    denominator = 2 * tp + fp + fn
    return 2 * tp / denominator if denominator else 0.0


def baseline_f1(n1: int, n2: int) -> float:
    """Worst-case weighted F1 for a test fold with n1 / n2 class members."""
    total = n1 + n2
    if n1 < 0 or n2 < 0 or total == 0:
        raise InsufficientDataError(f"Invalid class counts {n1}, {n2}")
    return (n1 / total) * (2 * n1 / (n2 + 2 * n1)) + (n2 / total) * (
        2 * n2 / (n1 + 2 * n2)
    )


@dataclass(frozen=True)
class FoldScore:
    """Scores of one cross-validation fold."""

    gamma1: float
    gamma2: float
    f1_class1: float
    f1_class2: float
    weighted_f1: float
    baseline_f1: float
    n1: int
    n2: int

    @property
    def improvement(self) -> float:
        return self.weighted_f1 - self.baseline_f1

    @classmethod
    def from_predictions(cls, y_true: np.ndarray, y_pred: np.ndarray) -> "FoldScore":
        y_true = np.asarray(y_true)
        y_pred = np.asarray(y_pred)
        n1 = int(np.sum(y_true == 1))
        n2 = int(np.sum(y_true == 2))
        gamma1 = n1 / (n1 + n2)
        gamma2 = n2 / (n1 + n2)
        f1_1 = f1_for_class(y_true, y_pred, 1)
        f1_2 = f1_for_class(y_true, y_pred, 2)
        return cls(
            gamma1=gamma1,
            gamma2=gamma2,
            f1_class1=f1_1,
            f1_class2=f1_2,
            weighted_f1=gamma1 * f1_1 + gamma2 * f1_2,
            baseline_f1=baseline_f1(n1, n2),
            n1=n1,
            n2=n2,
        )


def stratified_split(
    labels: np.ndarray, test_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Split indices so each class keeps its proportion in the test set.

    Each class sends round(count · test_fraction) members to the test set,
    at least one, and keeps at least one for training.

    Raises:
        InsufficientDataError: A class has fewer than 2 instances
    """
    if not 0 < test_fraction < 1:
        raise ConfigurationError(
            f"test_fraction must be in (0, 1), got {test_fraction}"
        )
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for label in CLASS_LABELS:
        members = np.flatnonzero(labels == label)
        if len(members) < 2:
            raise InsufficientDataError(
                f"insufficient instances: class {label} has {len(members)}"
            )
        n_test = int(np.floor(len(members) * test_fraction + 0.5))
        n_test = min(max(n_test, 1), len(members) - 1)
        shuffled = rng.permutation(members)
        test_parts.append(shuffled[:n_test])
        train_parts.append(shuffled[n_test:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def stratified_folds(labels: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """
    Test-index sets of k stratified folds; every index lands in exactly one.

    Raises:
        InsufficientDataError: A class has fewer than k instances
    """
    if k < 2:
        raise ConfigurationError(f"k must be >= 2, got {k}")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    folds: list[list[np.ndarray]] = [[] for _ in range(k)]
    for label in CLASS_LABELS:
        members = np.flatnonzero(labels == label)
        if len(members) < k:
            raise InsufficientDataError(
                f"too few instances for k folds: class {label} has "
                f"{len(members)}, k={k}"
            )
        for fold, chunk in zip(folds, np.array_split(rng.permutation(members), k)):
            fold.append(chunk)
    return [np.sort(np.concatenate(parts)) for parts in folds]


def cross_validate(
    rows: np.ndarray,
    labels: np.ndarray,
    k: int,
    config: ClassifierConfig,
    trainer: Trainer = train,
) -> list[FoldScore]:
    """
    Stratified k-fold cross-validation.

    Each fold's baseline is computed from that fold's own class counts.
    """
    rows = np.asarray(rows, dtype=np.float64)
    labels = np.asarray(labels)
    scores = []
    for test_index in stratified_folds(labels, k, config.seed):
        train_mask = np.ones(len(labels), dtype=bool)
        train_mask[test_index] = False
        model = trainer(rows[train_mask], labels[train_mask], config)
        predictions = model.predict(rows[test_index])
        scores.append(FoldScore.from_predictions(labels[test_index], predictions))
    return scores
