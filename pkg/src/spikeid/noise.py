"""Noise covariance estimators feeding the whitening transform.

Three estimators are provided, plus an identity ("brute") estimate for
ablation:

* ``fft`` - per-channel periodogram power averaged over the top frequency
  band, where oscillatory brain signals are assumed absent;
* ``residual`` - per-channel residual variance of a least-squares
  autoregressive fit (predictable signal removed, unpredictable part kept);
* ``threshold`` - sample covariance of the autoregressive residuals with
  off-diagonal entries hard-thresholded, giving a sparse non-diagonal estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .core import CovarianceMatrix, DataMatrix, as_data
from .exceptions import ConfigError, DataQualityError, DegenerateInputError

__all__ = [
    "NoiseEstimate",
    "NOISE_METHODS",
    "estimate_noise_fft",
    "estimate_noise_residual",
    "estimate_noise_threshold",
    "estimate_noise_brute",
    "estimate_noise",
]

NoiseMethod = Literal["fft", "residual", "threshold", "brute"]
NOISE_METHODS = ("fft", "residual", "threshold", "brute")

_FLOOR = 1e-12


@dataclass(frozen=True)
class NoiseEstimate:
    """A noise covariance estimate with its provenance.

    ``diagnostics`` holds the per-channel variances under ``"variances"`` and
    the method parameters; the residual method also stores the inverse
    variances under ``"precision"``.
    """

    covariance: CovarianceMatrix
    method: str
    diagnostics: dict = field(default_factory=dict, compare=False)
    warnings: tuple[str, ...] = ()

    @property
    def variances(self) -> NDArray[np.float64]:
        return np.diag(self.covariance.values).copy()


def _signal_rows(data: DataMatrix, baseline: tuple[int, int] | None) -> NDArray[np.float64]:
    y = data.values
    if baseline is not None:
        start, stop = baseline
        if not 0 <= start < stop <= data.n_samples:
            raise ConfigError(f"baseline interval {baseline} outside 0..{data.n_samples}")
        y = y[:, start:stop]
    if not np.any(y):
        raise DegenerateInputError("data are identically zero; no noise level can be estimated")
    return y


def _floor(variances: NDArray[np.float64], y: NDArray[np.float64], warnings: list[str]) -> NDArray[np.float64]:
    # the floor is relative to the largest total channel variance
    level = _FLOOR * float(np.max(np.var(y, axis=1)))
    level = max(level, np.finfo(float).tiny)
    low = variances < level
    if low.any():
        warnings.append(f"{int(low.sum())} channel noise variance(s) floored at {level:.3e}")
        variances = np.where(low, level, variances)
    return variances


def _diagonal(variances, method, diagnostics, warnings) -> NoiseEstimate:
    return NoiseEstimate(CovarianceMatrix(np.diag(variances), check_psd=False), method, diagnostics, tuple(warnings))


def estimate_noise_fft(
    data: DataMatrix, band_fraction: float = 0.25, baseline: tuple[int, int] | None = None
) -> NoiseEstimate:
    """Diagonal noise estimate from the high-frequency periodogram floor.

    For white noise of variance ``s2`` every periodogram ordinate
    ``|FFT|^2 / T`` has expectation ``s2``, so the mean over the top
    ``band_fraction`` of the one-sided frequency grid estimates ``s2``.
    """
    d = as_data(data)
    if not 0 < band_fraction <= 0.5:
        raise ConfigError("band_fraction must lie in (0, 0.5]")
    y = _signal_rows(d, baseline)
    t = y.shape[1]
    if t < 16:
        raise DataQualityError(f"FFT noise estimate needs at least 16 samples, got {t}")
    spec = np.abs(np.fft.rfft(y - y.mean(axis=1, keepdims=True), axis=1)) ** 2 / t
    n_bins = spec.shape[1]
    top = spec[:, -max(1, int(round(band_fraction * (n_bins - 1)))):]
    variances = top.mean(axis=1)
    warnings: list[str] = []
    variances = _floor(variances, y, warnings)
    diag = {"variances": variances, "band_fraction": band_fraction, "n_bins": top.shape[1]}
    return _diagonal(variances, "fft", diag, warnings)


def _ar_residuals(y: NDArray[np.float64], order: int) -> NDArray[np.float64]:
    """Least-squares AR(order) residuals per channel, intercept included."""
    k, t = y.shape
    if order == 0:
        return y - y.mean(axis=1, keepdims=True)
    n = t - order
    out = np.empty((k, n))
    for ch in range(k):
        x = y[ch]
        design = np.column_stack([np.ones(n)] + [x[order - lag : t - lag] for lag in range(1, order + 1)])
        target = x[order:]
        coef, *_ = np.linalg.lstsq(design, target, rcond=None)
        out[ch] = target - design @ coef
    return out


def estimate_noise_residual(
    data: DataMatrix, ar_order: int = 5, baseline: tuple[int, int] | None = None
) -> NoiseEstimate:
    """Diagonal noise estimate from autoregressive prediction residuals.

    Each channel is regressed on its own ``ar_order`` previous samples; the
    mean squared residual estimates the unpredictable (noise) variance.
    ``ar_order = 0`` reduces to the plain channel variance.
    """
    d = as_data(data)
    if ar_order < 0:
        raise ConfigError("ar_order must be nonnegative")
    y = _signal_rows(d, baseline)
    if y.shape[1] <= 10 * ar_order:
        raise DataQualityError(f"need more than {10 * ar_order} samples for an AR({ar_order}) fit")
    res = _ar_residuals(y, ar_order)
    variances = np.mean(res**2, axis=1)
    warnings: list[str] = []
    variances = _floor(variances, y, warnings)
    diag = {"variances": variances, "precision": 1.0 / variances, "ar_order": ar_order}
    return _diagonal(variances, "residual", diag, warnings)


def estimate_noise_threshold(
    data: DataMatrix,
    threshold_constant: float = 1.0,
    ar_order: int = 5,
    baseline: tuple[int, int] | None = None,
) -> NoiseEstimate:
    """Sparse noise covariance: hard-thresholded covariance of AR residuals.

    Off-diagonal entry ``(i, j)`` is kept only when its magnitude exceeds
    ``c * sqrt(log K / T) * sqrt(r_ii r_jj)``.  Thresholding can break
    positive semidefiniteness; if it does, the off-diagonal part is shrunk
    by the largest factor in ``[0, 1]`` that restores it (diagonal untouched).
    """
    d = as_data(data)
    if not threshold_constant > 0:
        raise ConfigError("threshold_constant must be positive")
    y = _signal_rows(d, baseline)
    k, t = y.shape
    warnings: list[str] = []
    if t < k / 4:
        warnings.append(f"T={t} is below K/4={k / 4:g}; thresholded covariance is unreliable")
    if t <= 10 * ar_order:
        raise DataQualityError(f"need more than {10 * ar_order} samples for an AR({ar_order}) fit")
    res = _ar_residuals(y, ar_order)
    res = res - res.mean(axis=1, keepdims=True)
    cov = res @ res.T / res.shape[1]
    variances = _floor(np.diag(cov).copy(), y, warnings)
    level = threshold_constant * math.sqrt(math.log(k) / res.shape[1]) if k > 1 else 0.0
    cut = level * np.sqrt(np.outer(variances, variances))
    off = np.where(np.abs(cov) > cut, cov, 0.0)
    np.fill_diagonal(off, 0.0)
    shrink = _psd_shrink(variances, off)
    if shrink < 1.0:
        warnings.append(f"off-diagonal part shrunk by {shrink:.4f} to keep the estimate positive semidefinite")
    mat = np.diag(variances) + shrink * off
    diag = {
        "variances": variances,
        "threshold_constant": threshold_constant,
        "threshold_level": level,
        "ar_order": ar_order,
        "n_offdiag_kept": int(np.count_nonzero(np.triu(off, 1))),
        "shrink": shrink,
    }
    return NoiseEstimate(CovarianceMatrix(mat, check_psd=False), "threshold", diag, tuple(warnings))


def _psd_shrink(variances: NDArray[np.float64], off: NDArray[np.float64]) -> float:
    """Largest ``a`` in [0, 1] with ``diag(v) + a*off`` positive definite (to 1e-10)."""
    if not np.any(off):
        return 1.0
    s = 1.0 / np.sqrt(variances)
    scaled = off * s[:, None] * s[None, :]
    lo = float(np.linalg.eigvalsh(scaled)[0])
    # I + a*scaled >= 1e-8 I  <=>  a <= (1 - 1e-8) / -lo  when lo < 0
    if lo >= -(1 - 1e-8):
        return 1.0
    return (1 - 1e-8) / -lo


def estimate_noise_brute(data: DataMatrix) -> NoiseEstimate:
    """Identity noise covariance: whitening becomes a no-op (ablation baseline)."""
    d = as_data(data)
    eye = np.eye(d.n_channels)
    return NoiseEstimate(CovarianceMatrix(eye, check_psd=False), "brute", {"variances": np.ones(d.n_channels)})


def estimate_noise(data: DataMatrix, method: NoiseMethod, **params) -> NoiseEstimate:
    """Dispatch to one of :data:`NOISE_METHODS`."""
    if method == "fft":
        return estimate_noise_fft(data, **params)
    if method == "residual":
        return estimate_noise_residual(data, **params)
    if method == "threshold":
        return estimate_noise_threshold(data, **params)
    if method == "brute":
        return estimate_noise_brute(data)
    raise ConfigError(f"unknown noise method {method!r}; choose from {', '.join(NOISE_METHODS)}")
