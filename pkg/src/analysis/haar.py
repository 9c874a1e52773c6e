"""
Haar basis matrices and the discrete wavelet transform.

The basis of dimension 2^n is built by the recurrence

    H(0) = [1]
    H(n) = [ H(n-1) ⊗ (1, 1)ᵀ  |  I(2^(n-1)) ⊗ (1, -1)ᵀ ]

whose columns are mutually orthogonal, so the inverse is simply
diag(1 / column squared norms) · Hᵀ. Bases are memoized per exponent.
"""

import logging
import threading
from dataclasses import dataclass

import numpy as np

from src.errors import DimensionError

logger = logging.getLogger(__name__)

MAX_EXPONENT = 16

_basis_cache: dict[int, "HaarBasis"] = {}
_cache_lock = threading.Lock()


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class HaarBasis:
    """Haar basis H(n), its inverse and the squared column norms."""

    n: int
    H: np.ndarray
    H_inv: np.ndarray
    col_sq_norms: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.n


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A zero-padded series of length 2^n."""

    values: np.ndarray
    original_len: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or not _is_pow2(len(values)):
            raise DimensionError(
                f"Time series length must be a power of two, got {values.shape}"
            )
        if not 1 <= self.original_len <= len(values):
            raise DimensionError(
                f"original_len {self.original_len} outside 1..{len(values)}"
            )
        if np.any(values[self.original_len :] != 0):
            raise DimensionError("Padding entries of a time series must be zero")
        object.__setattr__(self, "values", _readonly(values.copy()))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class WaveletVector:
    """Haar wavelet coefficients of a time series."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if coeffs.ndim != 1 or not _is_pow2(len(coeffs)):
            raise DimensionError(
                f"Coefficient vector length must be a power of two, got {coeffs.shape}"
            )
        object.__setattr__(self, "coeffs", _readonly(coeffs.copy()))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WaveletVector):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())


def _is_pow2(length: int) -> bool:
    return length >= 1 and length & (length - 1) == 0


def exponent_for(length: int) -> int:
    """Smallest n with 2^n >= length."""
    if length < 1:
        raise DimensionError(f"Length must be positive, got {length}")
    return (length - 1).bit_length()


def _recurrence(n: int) -> np.ndarray:
    H = np.ones((1, 1), dtype=np.int8)
    pair_sum = np.array([[1], [1]], dtype=np.int8)
    pair_diff = np.array([[1], [-1]], dtype=np.int8)
    for m in range(1, n + 1):
        identity = np.eye(1 << (m - 1), dtype=np.int8)
        H = np.hstack([np.kron(H, pair_sum), np.kron(identity, pair_diff)])
    return H


def build_basis(n: int) -> HaarBasis:
    """
    Return the Haar basis of dimension 2^n, building it on first use.

    Args:
        n: Exponent, 0 <= n <= MAX_EXPONENT

    Raises:
        DimensionError: n negative or above the cap
    """
    if n < 0:
        raise DimensionError(f"Basis exponent must be non-negative, got {n}")
    if n > MAX_EXPONENT:
        raise DimensionError(
            f"dimension too large: 2^{n} exceeds the cap of 2^{MAX_EXPONENT}"
        )

    cached = _basis_cache.get(n)
    if cached is not None:
        return cached

    with _cache_lock:
        cached = _basis_cache.get(n)
        if cached is not None:
            return cached

        H = _recurrence(n)
        col_sq_norms = np.einsum("ij,ij->j", H, H, dtype=np.int64)
        H_inv = (H.T.astype(np.float64)) / col_sq_norms[:, np.newaxis]
        basis = HaarBasis(
            n=n,
            H=_readonly(H),
            H_inv=_readonly(H_inv),
            col_sq_norms=_readonly(col_sq_norms),
        )
        _basis_cache[n] = basis
        logger.debug(f"Built Haar basis of dimension {basis.dim}")
        return basis


def pad_pow2(raw) -> TimeSeries:
    """Zero-pad a non-empty vector to the next power of two."""
    values = np.asarray(raw, dtype=np.float64).ravel()
    if len(values) == 0:
        raise DimensionError("Cannot pad an empty series")
    padded = np.zeros(1 << exponent_for(len(values)), dtype=np.float64)
    padded[: len(values)] = values
    return TimeSeries(padded, original_len=len(values))


def dwt(x: TimeSeries, basis: HaarBasis) -> WaveletVector:
    """Forward transform w = H⁻¹x."""
    if len(x) != basis.dim:
        raise DimensionError(
            f"Series of length {len(x)} does not match basis dimension {basis.dim}"
        )
    return WaveletVector(basis.H_inv @ x.values)


def idwt(
    w: WaveletVector, basis: HaarBasis, original_len: int | None = None
) -> TimeSeries:
    """
    Inverse transform x = Hw.

    When original_len is given, entries past it are snapped to exact zeros;
    they must already be zero up to floating point noise.
    """
    if len(w) != basis.dim:
        raise DimensionError(
            f"Coefficient vector of length {len(w)} does not match basis "
            f"dimension {basis.dim}"
        )
    values = basis.H @ w.coeffs
    if original_len is None:
        return TimeSeries(values, original_len=basis.dim)
    if np.any(np.abs(values[original_len:]) > 1e-9):
        raise DimensionError(
            f"Reconstructed series is non-zero past position {original_len}"
        )
    values[original_len:] = 0.0
    return TimeSeries(values, original_len=original_len)


def dwt_rows(series: np.ndarray, basis: HaarBasis) -> np.ndarray:
    """Transform every row of a (rows × 2^n) matrix in one product."""
    series = np.asarray(series, dtype=np.float64)
    if series.ndim != 2 or series.shape[1] != basis.dim:
        raise DimensionError(
            f"Expected a matrix with {basis.dim} columns, got shape {series.shape}"
        )
    return series @ basis.H_inv.T
