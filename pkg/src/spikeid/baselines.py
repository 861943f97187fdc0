"""Classical source-count criteria evaluated on a sample spectrum.

AIC and MDL compare the geometric and arithmetic means of the trailing
``K - N`` eigenvalues (equal for white noise) against a model-complexity
penalty; EIF is the empirical indicator function of factor analysis; the
PCA count is the smallest number of components explaining a given fraction
of the total variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = ["CriterionCurve", "aic_count", "mdl_count", "eif_count", "pca_count", "all_counts"]

_CLAMP = 1e-300


@dataclass(frozen=True)
class CriterionCurve:
    """Criterion values over candidate source counts and the selected count.

    For AIC, MDL and EIF ``values[N]`` is the criterion at ``N = 0..K-1`` and
    ``count`` its argmin (smallest on ties).  For PCA ``values[n]`` is the
    cumulative variance fraction of the first ``n + 1`` eigenvalues.
    """

    criterion: str
    values: NDArray[np.float64]
    count: int
    warnings: tuple[str, ...] = ()


def _prepare(eigs: ArrayLike, n_samples: int) -> tuple[NDArray[np.float64], list[str]]:
    e = np.sort(np.asarray(eigs, dtype=float))[::-1]
    if e.ndim != 1 or e.size < 2:
        raise ValueError("need at least two eigenvalues")
    if not np.all(np.isfinite(e)):
        raise ValueError("eigenvalues must be finite")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    notes = []
    low = e < _CLAMP
    if low.any():
        notes.append(f"{int(low.sum())} eigenvalue(s) clamped at {_CLAMP:g}")
        e = np.where(low, _CLAMP, e)
    return e, notes


def _log_mean_ratio(e: NDArray[np.float64]) -> NDArray[np.float64]:
    """``log(geometric mean / arithmetic mean)`` of ``e[N:]`` for ``N = 0..K-1``.

    Computed as a scale-free quantity: eigenvalues are divided by the largest
    one first, so multiplying the spectrum by a constant changes nothing.
    """
    k = e.size
    x = e / e[0]
    logs = np.log(x)
    tail_log = np.cumsum(logs[::-1])[::-1]  # sum_{j>=N} log x_j
    tail_sum = np.cumsum(x[::-1])[::-1]
    m = k - np.arange(k)
    return tail_log / m - np.log(tail_sum / m)


def _argmin(values: NDArray[np.float64]) -> int:
    return int(np.flatnonzero(values == values.min())[0])


def aic_count(eigs: ArrayLike, n_samples: int) -> CriterionCurve:
    """``AIC(N) = -2 (K-N) T log(g_N / a_N) + 2 N (2K - N)``."""
    e, notes = _prepare(eigs, n_samples)
    k = e.size
    n = np.arange(k)
    values = -2.0 * (k - n) * n_samples * _log_mean_ratio(e) + 2.0 * n * (2 * k - n)
    return CriterionCurve("AIC", values, _argmin(values), tuple(notes))


def mdl_count(eigs: ArrayLike, n_samples: int) -> CriterionCurve:
    """``MDL(N) = -(K-N) T log(g_N / a_N) + N (2K - N) log(T) / 2``."""
    e, notes = _prepare(eigs, n_samples)
    k = e.size
    n = np.arange(k)
    values = -(k - n) * n_samples * _log_mean_ratio(e) + 0.5 * n * (2 * k - n) * math.log(n_samples)
    return CriterionCurve("MDL", values, _argmin(values), tuple(notes))


def eif_count(eigs: ArrayLike, n_samples: int) -> CriterionCurve:
    """``EIF(N) = sqrt(sum_{j>N} l_j) / (sqrt(T) (K-N)^{3/2})``."""
    e, notes = _prepare(eigs, n_samples)
    k = e.size
    n = np.arange(k)
    tail = np.cumsum(e[::-1])[::-1]
    values = np.sqrt(tail) / (math.sqrt(n_samples) * (k - n) ** 1.5)
    return CriterionCurve("EIF", values, _argmin(values), tuple(notes))


def pca_count(eigs: ArrayLike, fraction: float) -> CriterionCurve:
    """Smallest ``n`` whose leading eigenvalues explain at least ``fraction`` of the variance."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    e = np.sort(np.asarray(eigs, dtype=float))[::-1]
    notes = []
    if np.any(e < 0):
        notes.append("negative eigenvalues set to zero")
        e = np.maximum(e, 0.0)
    total = e.sum()
    if not total > 0:
        raise ValueError("spectrum is identically zero")
    cum = np.cumsum(e) / total
    # relative slack so that exact ties such as 7/10 >= 0.7 survive rounding
    n = int(np.flatnonzero(cum >= fraction * (1 - 1e-12))[0]) + 1
    return CriterionCurve(f"PCA({fraction:g})", cum, n, tuple(notes))


def all_counts(eigs: ArrayLike, n_samples: int, fractions=(0.9, 0.8, 0.7)) -> dict[str, int]:
    """Every baseline count keyed by column name."""
    out = {f"PCA({f:g})": pca_count(eigs, f).count for f in fractions}
    out["AIC"] = aic_count(eigs, n_samples).count
    out["MDL"] = mdl_count(eigs, n_samples).count
    out["EIF"] = eif_count(eigs, n_samples).count
    return out
