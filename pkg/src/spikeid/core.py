"""Dense symmetric-matrix primitives and covariance conventions.

Every estimator in the package consumes channels-by-time recordings
(:class:`DataMatrix`) and symmetric covariance matrices
(:class:`CovarianceMatrix`), and works on the sorted spectrum returned by
:func:`eigen_decompose`.  Covariances use the ``1/T`` divisor throughout
because the spike estimator's constants (``gamma_T = K/T``) assume it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DataQualityError, DegenerateInputError, NumericalFailureError

__all__ = [
    "DataMatrix",
    "CovarianceMatrix",
    "EigenDecomposition",
    "as_data",
    "as_covariance",
    "sample_covariance",
    "eigen_decompose",
    "normalize_covariance",
    "normalize_data",
    "spectral_norm",
    "sample_spectrum",
]

NormalizationMode = Literal["one", "K", "K_squared"]


@dataclass(frozen=True)
class DataMatrix:
    """A ``K x T`` recording: one row per channel, one column per sample.

    Parameters
    ----------
    values : array_like
        Real ``(n_channels, n_samples)`` matrix.  Copied and made read-only.
    sample_period_ms : float
        Time between consecutive samples in milliseconds.
    units : str
        Free-form unit label, ``"fT"`` for simulated MEG.
    """

    values: NDArray[np.float64]
    sample_period_ms: float = 1.0
    units: str = "fT"

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise DataQualityError(f"data must be 2-D (channels x samples), got shape {arr.shape}")
        if arr.shape[0] < 2 or arr.shape[1] < 2:
            raise DataQualityError(
                f"need at least 2 channels and 2 samples, got {arr.shape[0]}x{arr.shape[1]}"
            )
        bad = ~np.isfinite(arr)
        if bad.any():
            row, col = np.argwhere(bad)[0]
            raise DataQualityError(f"non-finite value at channel {row}, sample {col}")
        if not self.sample_period_ms > 0:
            raise DataQualityError("sample_period_ms must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n_channels(self) -> int:
        return self.values.shape[0]

    @property
    def n_samples(self) -> int:
        return self.values.shape[1]

    @property
    def duration_ms(self) -> float:
        return self.n_samples * self.sample_period_ms

    def with_values(self, values: ArrayLike) -> "DataMatrix":
        """Copy of this recording's metadata wrapped around new values."""
        return DataMatrix(values, sample_period_ms=self.sample_period_ms, units=self.units)


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric positive semidefinite ``K x K`` matrix, symmetrized on construction."""

    values: NDArray[np.float64]
    check_psd: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DataQualityError(f"covariance must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DataQualityError("covariance contains non-finite entries")
        scale = np.max(np.abs(arr)) if arr.size else 0.0
        if scale > 0 and np.max(np.abs(arr - arr.T)) > 1e-6 * scale:
            raise DataQualityError("covariance is not symmetric")
        arr = 0.5 * (arr + arr.T)
        if self.check_psd and scale > 0:
            w = np.linalg.eigvalsh(arr)
            if w[0] < -1e-10 * max(w[-1], 0.0) - 1e-300:
                raise DataQualityError(
                    f"covariance is not positive semidefinite (min eigenvalue {w[0]:.3e}, "
                    f"max {w[-1]:.3e})"
                )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending with matching orthonormal eigenvectors (columns)."""

    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.float64]

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> NDArray[np.float64]:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def as_data(data: DataMatrix | ArrayLike) -> DataMatrix:
    return data if isinstance(data, DataMatrix) else DataMatrix(np.asarray(data, dtype=float))


def as_covariance(c: CovarianceMatrix | ArrayLike, *, check_psd: bool = False) -> CovarianceMatrix:
    if isinstance(c, CovarianceMatrix):
        return c
    return CovarianceMatrix(np.asarray(c, dtype=float), check_psd=check_psd)


def sample_covariance(data: DataMatrix | ArrayLike, center: bool = True) -> CovarianceMatrix:
    """``(1/T) sum_t (y_t - ybar)(y_t - ybar)^T``, or uncentered when ``center`` is false."""
    y = as_data(data).values
    if center:
        y = y - y.mean(axis=1, keepdims=True)
    cov = (y @ y.T) / y.shape[1]
    return CovarianceMatrix(cov, check_psd=False)


def sample_spectrum(data: DataMatrix | ArrayLike, center: bool = True) -> NDArray[np.float64]:
    """Eigenvalues of :func:`sample_covariance`, descending, via singular values of the data.

    Squared singular values are nonnegative by construction, so rank-deficient
    (noise-free) recordings yield tiny positive values instead of the signed
    round-off a symmetric eigensolver returns.
    """
    y = as_data(data).values
    if center:
        y = y - y.mean(axis=1, keepdims=True)
    s = np.linalg.svd(y, compute_uv=False)
    out = np.zeros(y.shape[0])
    out[: s.size] = s**2 / y.shape[1]
    return out


def _sign_fix(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    # largest-magnitude component of each column made nonnegative
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigen_decompose(c: CovarianceMatrix | ArrayLike) -> EigenDecomposition:
    """Symmetric eigendecomposition, eigenvalues descending, deterministic signs."""
    mat = as_covariance(c).values
    try:
        w, v = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        norm = np.linalg.norm(mat, 2) if np.all(np.isfinite(mat)) else float("nan")
        raise NumericalFailureError(
            f"symmetric eigensolver failed for {mat.shape[0]}x{mat.shape[0]} matrix "
            f"(spectral norm {norm:.3e}, trace {np.trace(mat):.3e}): {exc}"
        ) from exc
    order = np.argsort(w)[::-1]
    w = w[order]
    v = _sign_fix(v[:, order])
    return EigenDecomposition(w, v)


def spectral_norm(c: CovarianceMatrix | ArrayLike) -> float:
    mat = as_covariance(c).values
    return float(np.max(np.abs(np.linalg.eigvalsh(mat))))


_PHI = {
    "one": lambda k: 1.0,
    "K": lambda k: float(k),
    "K_squared": lambda k: float(k) ** 2,
}


def normalize_covariance(c: CovarianceMatrix | ArrayLike, mode: NormalizationMode = "K") -> CovarianceMatrix:
    """Rescale so the spectral norm equals ``phi(K)`` (1, K or K**2).

    Guards against round-off on recordings with tiny physical magnitudes;
    every downstream estimator is scale invariant.
    """
    cov = as_covariance(c)
    if mode not in _PHI:
        raise ValueError(f"unknown normalization mode {mode!r}")
    norm = spectral_norm(cov)
    if norm <= 0:
        raise DegenerateInputError("cannot normalize a zero covariance matrix")
    return CovarianceMatrix(cov.values * (_PHI[mode](cov.dim) / norm), check_psd=False)


def normalize_data(data: DataMatrix | ArrayLike, cov: CovarianceMatrix | ArrayLike) -> DataMatrix:
    """Scale a recording by ``sqrt(K / ||R||_2)`` so its covariance has norm ``K``."""
    d = as_data(data)
    norm = spectral_norm(cov)
    if norm <= 0:
        raise DegenerateInputError("cannot normalize data with a zero covariance matrix")
    return d.with_values(d.values * np.sqrt(d.n_channels / norm))
