"""Signal-to-noise rescaling and the noise-whitening transform.

The rescaling functional ``I(X) = ||X^T R X||_2 / ||X^T R_n X||_2`` is
maximized in closed form by ``W_n = Phi_n Lambda_n^{-1/2}`` built from the
noise eigendecomposition; the maximum is the top eigenvalue of
``W_n^T R W_n``.  Nothing here searches over ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import CovarianceMatrix, as_covariance, eigen_decompose
from .exceptions import DegenerateInputError

__all__ = [
    "WhiteningOperator",
    "AdjustedCovariance",
    "OptimalityReport",
    "snr_functional",
    "whitener_from_noise",
    "adjusted_covariance",
    "optimality_report",
    "perturbation_curve",
    "loglog_slope",
]


@dataclass(frozen=True)
class WhiteningOperator:
    """``W = Phi Lambda^{-1/2}`` from a noise covariance.

    ``noise_eigs`` holds the (possibly floored) noise eigenvalues in the
    column order of ``matrix``; ``floor_applied`` records whether any were
    clamped.
    """

    matrix: NDArray[np.float64]
    noise_eigs: NDArray[np.float64]
    floor_applied: bool = False
    eigenvectors: NDArray[np.float64] | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, y: ArrayLike) -> NDArray[np.float64]:
        """Whitened data ``W^T y`` for a ``K x T`` array."""
        return self.matrix.T @ np.asarray(y, dtype=float)


@dataclass(frozen=True)
class AdjustedCovariance:
    """``W^T R W``: the covariance seen after whitening."""

    matrix: NDArray[np.float64]
    source_whitener: WhiteningOperator

    def as_covariance(self) -> CovarianceMatrix:
        return CovarianceMatrix(self.matrix, check_psd=False)


@dataclass(frozen=True)
class OptimalityReport:
    lambda_max: float
    value_whitener: float
    value_rotated: float

    def max_relative_error(self) -> float:
        ref = abs(self.lambda_max)
        return max(abs(self.value_whitener - ref), abs(self.value_rotated - ref)) / ref


def _op_norm(m: NDArray[np.float64]) -> float:
    return float(np.linalg.norm(m, 2))


def snr_functional(x: ArrayLike, r: CovarianceMatrix | ArrayLike, r_noise: CovarianceMatrix | ArrayLike) -> float:
    """Ratio of operator norms ``||X^T R X||_2 / ||X^T R_n X||_2``."""
    x = np.asarray(x, dtype=float)
    rm = as_covariance(r).values
    rn = as_covariance(r_noise).values
    den = _op_norm(x.T @ rn @ x)
    if den < 1e-300:
        raise DegenerateInputError("noise term of the SNR functional vanishes")
    return _op_norm(x.T @ rm @ x) / den


def whitener_from_noise(r_noise: CovarianceMatrix | ArrayLike, eig_floor: float = 1e-10) -> WhiteningOperator:
    """Build ``W_n = Phi_n Lambda_n^{-1/2}``.

    Noise eigenvalues below ``eig_floor * lambda_max`` are clamped to that
    level so rank-deficient noise estimates stay invertible.
    """
    if eig_floor < 0:
        raise ValueError("eig_floor must be nonnegative")
    eig = eigen_decompose(as_covariance(r_noise))
    lam = eig.eigenvalues.copy()
    top = lam[0]
    if top <= 0:
        raise DegenerateInputError("noise covariance is zero; cannot whiten")
    floor = eig_floor * top
    clamp = lam < max(floor, np.finfo(float).tiny)
    floor_applied = bool(clamp.any())
    if floor_applied:
        lam[clamp] = max(floor, np.finfo(float).tiny)
    w = eig.eigenvectors / np.sqrt(lam)
    return WhiteningOperator(w, lam, floor_applied, eig.eigenvectors)


def adjusted_covariance(r: CovarianceMatrix | ArrayLike, w: WhiteningOperator) -> AdjustedCovariance:
    rm = as_covariance(r).values
    if rm.shape[0] != w.dim:
        raise ValueError(f"dimension mismatch: covariance is {rm.shape[0]}, whitener is {w.dim}")
    adj = w.matrix.T @ rm @ w.matrix
    return AdjustedCovariance(0.5 * (adj + adj.T), w)


def optimality_report(r: CovarianceMatrix | ArrayLike, r_noise: CovarianceMatrix | ArrayLike) -> OptimalityReport:
    """Cross-check the closed-form maximizer of the SNR functional.

    Evaluates the functional at ``W_n`` and at ``W_n Phi_adj`` and reports
    both next to ``lambda_max(W_n^T R W_n)`` from a direct eigen-solve.
    """
    rm = as_covariance(r).values
    rn = as_covariance(r_noise).values
    if abs(np.linalg.det(rm)) == 0.0:
        raise DegenerateInputError("R must be nonsingular")
    if np.linalg.eigvalsh(rn)[0] <= 0:
        raise DegenerateInputError("noise covariance must be positive definite")
    w = whitener_from_noise(rn, eig_floor=0.0)
    adj = adjusted_covariance(rm, w)
    eig = eigen_decompose(adj.as_covariance())
    x2 = w.matrix @ eig.eigenvectors
    return OptimalityReport(
        lambda_max=float(eig.eigenvalues[0]),
        value_whitener=snr_functional(w.matrix, rm, rn),
        value_rotated=snr_functional(x2, rm, rn),
    )


def perturbation_curve(
    r: CovarianceMatrix | ArrayLike,
    r_noise: CovarianceMatrix | ArrayLike,
    omegas,
    seed: int | None = 0,
) -> list[tuple[float, float]]:
    """Deviation ``||R_adj(omega) - R_adj||_2`` under size-``omega`` whitener errors.

    The noise eigenvectors are perturbed as ``qr(Phi + omega E)`` and the
    inverse square-root eigenvalues as ``Lambda^{-1/2} + omega D``, with
    ``E`` (unit Frobenius norm) and ``D`` (unit-norm diagonal) drawn once
    from ``seed`` and shared by every ``omega``.
    """
    omegas = [float(o) for o in omegas]
    if not omegas:
        raise ValueError("omega list is empty")
    if any(o < 0 or not np.isfinite(o) for o in omegas):
        raise ValueError("omega values must be finite and nonnegative")
    rm = as_covariance(r).values
    w = whitener_from_noise(r_noise, eig_floor=0.0)
    phi = w.eigenvectors
    inv_sqrt = 1.0 / np.sqrt(w.noise_eigs)
    if max(omegas) >= inv_sqrt.min():
        raise ValueError("omega too large: perturbed Lambda^{-1/2} would lose positivity")
    base = w.matrix.T @ rm @ w.matrix

    rng = np.random.default_rng(seed)
    k = rm.shape[0]
    e = rng.standard_normal((k, k))
    e /= np.linalg.norm(e)
    d = rng.standard_normal(k)
    d /= np.linalg.norm(d)

    out = []
    for om in omegas:
        if om == 0.0:
            out.append((om, 0.0))
            continue
        q, rr = np.linalg.qr(phi + om * e)
        q = q * np.sign(np.diag(rr))
        w_hat = q * (inv_sqrt + om * d)
        dev = w_hat.T @ rm @ w_hat - base
        out.append((om, _op_norm(dev)))
    return out


def loglog_slope(curve: list[tuple[float, float]]) -> float:
    """Least-squares slope of ``log(deviation)`` against ``log(omega)`` (positive points only)."""
    pts = np.array([(o, d) for o, d in curve if o > 0 and d > 0])
    if len(pts) < 2:
        raise ValueError("need at least two positive points to fit a slope")
    return float(np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)[0])
