"""Spiked population eigenvalue estimation and intrinsic dimensionality.

Pipeline (see :func:`intrinsic_dimensionality`):

1. whiten the recording with a noise covariance (optional),
2. eigendecompose the sample covariance,
3. pick the spike/bulk cut ``delta`` by walking up from the smallest
   eigenvalue until a gap of at least ``epsilon0 / 2`` appears,
4. pick the grouping radius ``epsilon`` on the grid ``epsilon0, 2 epsilon0, ...``
   by a Monte-Carlo discrepancy,
5. group the sample eigenvalues above ``delta`` and map each group mean to a
   population spike with the Stieltjes-type estimator
   ``-1 / [(gamma - 1)/m + (1/T) sum_j 1/(l_j - m)]``.

The number of groups is the intrinsic dimensionality ``L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import ortho_group

from ._rng import standard_draws, substream
from .core import CovarianceMatrix, DataMatrix, as_data, eigen_decompose, normalize_data, sample_covariance
from .exceptions import ConfigError, DegenerateInputError, EstimationError, ModelFailureError
from .snr import whitener_from_noise

__all__ = [
    "SpikedModelSpec",
    "Thresholds",
    "IDConfig",
    "IDReport",
    "EpsilonSearch",
    "mp_edges",
    "group_eigenvalues",
    "estimate_spike_group",
    "estimate_bulk",
    "choose_delta",
    "choose_epsilon",
    "estimate_from_spectrum",
    "intrinsic_dimensionality",
    "sample_spiked_model",
]

Distribution = Literal["gaussian", "uniform", "t"]
StopRule = Literal["span", "fraction"]
Discrepancy = Literal["mean", "spectrum"]

_T_DF = 5


@dataclass(frozen=True)
class SpikedModelSpec:
    """Population covariance with unit (or ``bulk_value``) bulk and distinct spikes.

    ``spikes`` is a sequence of ``(value, multiplicity)`` pairs with strictly
    decreasing values.
    """

    spikes: tuple[tuple[float, int], ...]
    dim: int
    bulk_value: float = 1.0

    def __post_init__(self) -> None:
        spikes = tuple((float(v), int(m)) for v, m in self.spikes)
        object.__setattr__(self, "spikes", spikes)
        values = [v for v, _ in spikes]
        if any(m < 1 for _, m in spikes):
            raise ValueError("spike multiplicities must be positive")
        if any(b >= a for a, b in zip(values, values[1:])):
            raise ValueError("spike values must be strictly decreasing")
        if values and values[-1] <= self.bulk_value:
            raise ValueError("every spike must exceed the bulk value")
        if self.bulk_value <= 0:
            raise ValueError("bulk_value must be positive")
        if self.n_spiked >= self.dim:
            raise ValueError(f"total multiplicity {self.n_spiked} must be below dim {self.dim}")

    @property
    def n_spiked(self) -> int:
        return sum(m for _, m in self.spikes)

    @property
    def n_distinct(self) -> int:
        return len(self.spikes)

    def population_eigenvalues(self) -> NDArray[np.float64]:
        parts = [np.full(m, v) for v, m in self.spikes]
        parts.append(np.full(self.dim - self.n_spiked, self.bulk_value))
        return np.concatenate(parts)

    def min_spike_gap(self) -> float:
        values = [v for v, _ in self.spikes]
        return min((a - b for a, b in zip(values, values[1:])), default=math.inf)


@dataclass(frozen=True)
class Thresholds:
    delta: float
    epsilon: float
    epsilon0: float
    epsilon_prime: float

    def __post_init__(self) -> None:
        for name in ("delta", "epsilon", "epsilon0", "epsilon_prime"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.epsilon_prime > self.epsilon:
            raise ValueError("epsilon_prime must not exceed epsilon")


@dataclass(frozen=True)
class IDConfig:
    """Tuning of :func:`intrinsic_dimensionality`.

    ``epsilon0`` (absolute) wins over ``epsilon0_fraction`` (relative to the
    largest sample eigenvalue); with neither, the smallest sample eigenvalue
    is used.  ``strict`` turns a spectrum without spike/bulk separation into
    a :class:`ModelFailureError` instead of an ``L = 0`` report.
    """

    epsilon0: float | None = None
    epsilon0_fraction: float | None = None
    epsilon_prime: float | None = None
    epsilon_prime_fraction: float = 0.01
    delta: float | None = None
    mc_samples: int = 100
    dist: Distribution = "gaussian"
    stop_rule: StopRule = "fraction"
    fraction_p: float = 0.4
    discrepancy: Discrepancy = "mean"
    max_candidates: int = 1000
    epsilon0_fallback_fraction: float = 1e-8
    seed: int = 0
    strict: bool = False
    center: bool = True
    normalize: bool = True
    eig_floor: float = 1e-10

    def __post_init__(self) -> None:
        if self.mc_samples < 1:
            raise ConfigError("mc_samples must be at least 1")
        if self.dist not in ("gaussian", "uniform", "t"):
            raise ConfigError(f"unknown dist {self.dist!r}")
        if self.stop_rule not in ("span", "fraction"):
            raise ConfigError(f"unknown stop rule {self.stop_rule!r}")
        if self.discrepancy not in ("mean", "spectrum"):
            raise ConfigError(f"unknown discrepancy {self.discrepancy!r}")
        if not 0 < self.fraction_p:
            raise ConfigError("fraction_p must be positive")
        if self.epsilon0 is not None and not self.epsilon0 > 0:
            raise ConfigError("epsilon0 must be positive")
        if self.epsilon0_fraction is not None and not self.epsilon0_fraction > 0:
            raise ConfigError("epsilon0_fraction must be positive")
        if self.max_candidates < 1:
            raise ConfigError("max_candidates must be at least 1")


@dataclass(frozen=True)
class EpsilonSearch:
    """Outcome of the grouping-radius search: chosen radius and the full trace."""

    epsilon: float
    candidates: tuple[float, ...]
    discrepancies: tuple[float, ...]
    n_groups: tuple[int, ...]
    warnings: tuple[str, ...] = ()

    @property
    def best_index(self) -> int:
        return self.candidates.index(self.epsilon)


@dataclass(frozen=True)
class IDReport:
    """Estimated intrinsic dimensionality and everything needed to audit it."""

    L: int
    estimated_spikes: tuple[float, ...]
    groups: tuple[tuple[int, ...], ...]
    group_means: tuple[float, ...]
    bulk_estimate: float
    thresholds: Thresholds | None
    gamma_T: float
    sample_eigenvalues: NDArray[np.float64] = field(repr=False)
    n_samples: int = 0
    epsilon_candidates: tuple[float, ...] = ()
    discrepancy_trace: tuple[float, ...] = ()
    assumption_warnings: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    def group_labels(self) -> NDArray[np.int64]:
        """Per-eigenvalue group id (1-based), 0 for bulk."""
        labels = np.zeros(len(self.sample_eigenvalues), dtype=np.int64)
        for gid, g in enumerate(self.groups, start=1):
            labels[list(g)] = gid
        return labels

    def as_dict(self) -> dict:
        th = self.thresholds
        return {
            "L": self.L,
            "estimated_spikes": list(self.estimated_spikes),
            "group_sizes": [len(g) for g in self.groups],
            "group_means": list(self.group_means),
            "bulk_estimate": self.bulk_estimate,
            "delta": th.delta if th else None,
            "epsilon": th.epsilon if th else None,
            "epsilon0": th.epsilon0 if th else None,
            "epsilon_prime": th.epsilon_prime if th else None,
            "gamma_T": self.gamma_T,
            "n_channels": len(self.sample_eigenvalues),
            "n_samples": self.n_samples,
            "epsilon_candidates": list(self.epsilon_candidates),
            "discrepancy_trace": list(self.discrepancy_trace),
            "assumption_warnings": list(self.assumption_warnings),
            "warnings": list(self.warnings),
        }


# --------------------------------------------------------------------------
# primitives


def mp_edges(gamma: float, sigma2: float = 1.0) -> tuple[float, float]:
    """Edges ``sigma2 (1 -/+ sqrt(gamma))**2`` of the Marchenko-Pastur support."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    r = math.sqrt(gamma)
    return sigma2 * (1 - r) ** 2, sigma2 * (1 + r) ** 2


def _as_descending(eigs: ArrayLike) -> NDArray[np.float64]:
    e = np.asarray(eigs, dtype=float)
    if e.ndim != 1 or e.size == 0:
        raise ValueError("eigenvalues must be a non-empty 1-D array")
    if not np.all(np.isfinite(e)):
        raise ValueError("eigenvalues must be finite")
    tol = 1e-12 * max(np.max(np.abs(e)), 1e-300)
    if np.any(np.diff(e) > tol):
        raise ValueError("eigenvalues must be sorted in descending order")
    return e


def group_eigenvalues(eigs: ArrayLike, delta: float, epsilon: float) -> list[NDArray[np.int64]]:
    """Greedy radius grouping of the eigenvalues above ``delta``.

    Each group starts at the largest eigenvalue not yet assigned and absorbs
    every following eigenvalue within ``epsilon`` of that anchor.  Returns
    0-based index arrays, largest eigenvalues first.
    """
    e = _as_descending(eigs)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    n = int(np.count_nonzero(e > delta))
    groups = []
    k = 0
    while k < n:
        # e is descending, so members within epsilon of e[k] are contiguous
        j = k + int(np.searchsorted(-e[k:n], -(e[k] - epsilon), side="right"))
        j = max(j, k + 1)
        groups.append(np.arange(k, j))
        k = j
    return groups


def estimate_spike_group(
    eigs: ArrayLike,
    group: Sequence[int],
    n_samples: int,
    n_channels: int | None = None,
    epsilon_prime: float = 0.0,
) -> float:
    """Population spike behind one group of sample eigenvalues.

    With ``m`` the group mean and ``gamma = K/T``::

        s = (gamma - 1)/m + (1/T) * sum_{|l_j - m| > epsilon_prime} 1/(l_j - m)

    and the estimate is ``-1/s``.
    """
    e = np.asarray(eigs, dtype=float)
    idx = np.asarray(group, dtype=np.int64)
    if idx.size == 0:
        raise EstimationError("empty group")
    k = e.size if n_channels is None else int(n_channels)
    gamma = k / n_samples
    if not 0 < gamma < 1:
        raise EstimationError(f"K/T = {gamma:.4g} must lie in (0, 1)")
    m = float(e[idx].mean())
    if m <= 0:
        raise EstimationError(f"group mean {m:.4g} is not positive")
    d = e - m
    keep = np.abs(d) > epsilon_prime
    s = (gamma - 1.0) / m + np.sum(1.0 / d[keep]) / n_samples
    if s == 0.0 or not np.isfinite(s):
        raise EstimationError("Stieltjes statistic is zero or non-finite")
    est = -1.0 / s
    if est <= 0:
        raise EstimationError(f"estimator returned a non-positive spike ({est:.4g})")
    return float(est)


def estimate_bulk(eigs: ArrayLike, delta: float) -> float:
    """Mean of the sample eigenvalues at or below ``delta``."""
    e = np.asarray(eigs, dtype=float)
    bulk = e[e <= delta]
    if bulk.size == 0:
        raise EstimationError(f"no eigenvalue at or below delta={delta:.4g}")
    return float(bulk.mean())


def choose_delta(eigs: ArrayLike, epsilon0: float) -> float:
    """Spike/bulk cut: walk up from the smallest eigenvalue across gaps below ``epsilon0/2``.

    Raises :class:`ModelFailureError` when the walk reaches the top of the
    spectrum without meeting a gap of at least ``epsilon0/2``.
    """
    e = _as_descending(eigs)
    if not epsilon0 > 0:
        raise ValueError("epsilon0 must be positive")
    if e.size < 2:
        raise ValueError("need at least two eigenvalues")
    half = epsilon0 / 2.0
    gaps = e[:-1] - e[1:]  # gaps[i] = e[i] - e[i+1]
    wide = np.flatnonzero(gaps >= half)
    if wide.size == 0:
        raise ModelFailureError()
    # the walk stops at the lowest wide gap; delta is the eigenvalue just below it
    return float(e[wide[-1] + 1])


# --------------------------------------------------------------------------
# threshold learning


def _grid_size(lam_first: float, lam_last: float, epsilon0: float, stop_rule: str, fraction_p: float) -> int:
    limit = (lam_first - lam_last) if stop_rule == "span" else fraction_p * lam_first
    n = int(math.floor(limit / epsilon0 * (1 + 1e-9))) if limit > 0 else 0
    return max(n, 1)


def _grouping_breaks(spiked: NDArray[np.float64], epsilon0: float, n_grid: int) -> list[int]:
    """Grid indices ``j`` at which the grouping of ``spiked`` can change.

    The grouping depends on ``epsilon`` only through the comparisons
    ``l_a - l_b <= epsilon``, so it is constant between consecutive pairwise
    differences; the first grid point after each difference suffices.
    """
    diffs = (spiked[:, None] - spiked[None, :])[np.triu_indices(spiked.size, 1)]
    js = np.ceil(np.unique(diffs) / epsilon0).astype(np.int64)
    js = np.concatenate([[1], js - 1, js, js + 1])  # +-1 absorbs rounding at the boundary
    js = np.unique(js[(js >= 1) & (js <= n_grid)])
    return js.tolist()


def _population_diagonal(eigs, delta, epsilon, n_samples, eps_prime, bulk):
    groups = group_eigenvalues(eigs, delta, epsilon)
    k = eigs.size
    diag = np.full(k, max(bulk, 0.0))
    estimates = []
    for g in groups:
        est = estimate_spike_group(eigs, g, n_samples, k, eps_prime)
        diag[g] = est
        estimates.append(est)
    return groups, estimates, diag


def _bartlett(rng: np.random.Generator, k: int, df: int) -> NDArray[np.float64]:
    a = np.tril(rng.standard_normal((k, k)), -1)
    a[np.diag_indices(k)] = np.sqrt(rng.chisquare(df - np.arange(k)))
    return a


def _null_covariances(k: int, n_samples: int, reps: int, dist: str, seed: int, center: bool):
    """Sample covariances of ``reps`` identity-covariance draws, shared by all candidates."""
    rng = substream(seed, "epsilon-search", "spectrum", dist)
    df = n_samples - 1 if center else n_samples
    out = []
    for _ in range(reps):
        if dist == "gaussian" and df >= k:
            a = _bartlett(rng, k, df)
            out.append(a @ a.T / n_samples)
        else:
            x = standard_draws(rng, (k, n_samples), dist, _T_DF)
            if center:
                x = x - x.mean(axis=1, keepdims=True)
            out.append(x @ x.T / n_samples)
    return out


def choose_epsilon(
    eigs: ArrayLike,
    delta: float,
    epsilon0: float,
    n_samples: int,
    data_mean: ArrayLike | None = None,
    *,
    mc_samples: int = 100,
    dist: Distribution = "gaussian",
    stop_rule: StopRule = "fraction",
    fraction_p: float = 0.4,
    epsilon_prime: float | None = None,
    discrepancy: Discrepancy = "mean",
    max_candidates: int = 1000,
    center: bool = True,
    seed: int = 0,
) -> EpsilonSearch:
    """Learn the grouping radius on the grid ``epsilon0, 2*epsilon0, ...``.

    For every candidate the spikes are estimated, a diagonal population
    covariance ``V`` (estimated spikes over their groups, bulk mean
    elsewhere) is formed and ``mc_samples`` random draws are compared with
    the data:

    ``"mean"``
        draws ``Z_i ~ (data_mean, V)`` and scores
        ``||mean_i Z_i - data_mean|| / ||data_mean||``.
    ``"spectrum"``
        draws ``T``-sample covariances from ``V`` and scores the relative
        distance between their mean sorted spectrum and ``eigs``.

    Both use one random block for every candidate, so differences in the
    trace come from ``V`` alone.  The smallest score wins; ties go to the
    smaller radius.

    The exclusion radius ``epsilon_prime`` is capped at ``epsilon0`` so it
    never exceeds a candidate radius.  When the grid is longer than
    ``max_candidates``, only the first grid point of every distinct grouping
    is scored; the grouping (hence the score) is constant in between, so the
    argmin is unchanged and the returned trace lists those points only.
    """
    e = _as_descending(eigs)
    k = e.size
    if not epsilon0 > 0:
        raise ValueError("epsilon0 must be positive")
    eps_prime = 0.01 * e[0] if epsilon_prime is None else float(epsilon_prime)
    eps_prime = min(eps_prime, epsilon0)
    warnings: list[str] = []

    if not np.any(e > delta):
        warnings.append("no sample eigenvalue above delta; epsilon falls back to epsilon0")
        return EpsilonSearch(epsilon0, (epsilon0,), (math.nan,), (0,), tuple(warnings))

    n_grid = _grid_size(e[0], e[-1], epsilon0, stop_rule, fraction_p)
    if n_grid <= max_candidates:
        steps = list(range(1, n_grid + 1))
    else:
        steps = _grouping_breaks(e[e > delta], epsilon0, n_grid)
        warnings.append(
            f"epsilon grid has {n_grid} points; scored the {len(steps)} where the grouping changes"
        )
    candidates = [epsilon0 * j for j in steps]

    bulk = estimate_bulk(e, delta)

    if discrepancy == "mean":
        if data_mean is None:
            raise ValueError("the mean discrepancy needs the data mean")
        zbar = np.asarray(data_mean, dtype=float)
        zbar_norm = float(np.linalg.norm(zbar))
        if zbar_norm == 0.0:
            raise DegenerateInputError("data mean is exactly zero; relative discrepancy undefined")
        xi = standard_draws(substream(seed, "epsilon-search", "mean", dist), (mc_samples, k), dist, _T_DF)

        def score(diag):
            z = zbar + np.sqrt(diag) * xi
            return float(np.linalg.norm(z.mean(axis=0) - zbar) / zbar_norm)

    elif discrepancy == "spectrum":
        base = _null_covariances(k, n_samples, mc_samples, dist, seed, center)
        e_norm = float(np.linalg.norm(e))

        def score(diag):
            s = np.sqrt(diag)
            acc = np.zeros(k)
            for c in base:
                acc += np.linalg.eigvalsh(c * s[:, None] * s[None, :])[::-1]
            return float(np.linalg.norm(acc / len(base) - e) / e_norm)

    else:
        raise ValueError(f"unknown discrepancy {discrepancy!r}")

    scores, counts = [], []
    cache: dict[tuple, float] = {}
    for eps in candidates:
        try:
            groups, _, diag = _population_diagonal(e, delta, eps, n_samples, eps_prime, bulk)
        except EstimationError as exc:
            warnings.append(f"epsilon={eps:.4g}: {exc}")
            scores.append(math.inf)
            counts.append(0)
            continue
        key = tuple(len(g) for g in groups)
        if key not in cache:
            cache[key] = score(diag)
        scores.append(cache[key])
        counts.append(len(groups))

    finite = [s for s in scores if np.isfinite(s)]
    if not finite:
        warnings.append("every epsilon candidate failed; falling back to epsilon0")
        best = 0
    else:
        best = int(np.argmin(np.where(np.isfinite(scores), scores, np.inf)))
    return EpsilonSearch(candidates[best], tuple(candidates), tuple(scores), tuple(counts), tuple(warnings))


# --------------------------------------------------------------------------
# orchestration


def _resolve_epsilon0(e: NDArray[np.float64], cfg: IDConfig, warnings: list[str]) -> float:
    if cfg.epsilon0 is not None:
        return float(cfg.epsilon0)
    if cfg.epsilon0_fraction is not None:
        return float(cfg.epsilon0_fraction * e[0])
    smallest = float(e[-1])
    if smallest > 1e-8 * e[0]:
        return smallest
    eps0 = cfg.epsilon0_fallback_fraction * float(e[0])
    warnings.append(
        f"smallest eigenvalue {smallest:.3g} is numerically zero; epsilon0 set to "
        f"{cfg.epsilon0_fallback_fraction:g} x largest eigenvalue"
    )
    return eps0


def _empty_report(e, n_samples, gamma, warnings, assumption_warnings=()):
    return IDReport(
        L=0,
        estimated_spikes=(),
        groups=(),
        group_means=(),
        bulk_estimate=float(np.mean(e)),
        thresholds=None,
        gamma_T=gamma,
        sample_eigenvalues=e,
        n_samples=n_samples,
        assumption_warnings=tuple(assumption_warnings),
        warnings=tuple(warnings),
    )


def estimate_from_spectrum(
    eigs: ArrayLike,
    n_samples: int,
    config: IDConfig | None = None,
    *,
    data_mean: ArrayLike | None = None,
    warnings: Sequence[str] = (),
) -> IDReport:
    """Run threshold learning, grouping and spike estimation on a sorted spectrum."""
    cfg = config or IDConfig()
    e = _as_descending(eigs)
    k = e.size
    gamma = k / n_samples
    if not 0 < gamma < 1:
        raise EstimationError(f"K/T = {gamma:.4g} must lie in (0, 1); need more samples than channels")
    if not e[0] > 0:
        raise DegenerateInputError("largest eigenvalue is not positive")
    notes = list(warnings)

    eps0 = _resolve_epsilon0(e, cfg, notes)
    try:
        delta = float(cfg.delta) if cfg.delta is not None else choose_delta(e, eps0)
    except ModelFailureError:
        if cfg.strict:
            raise
        notes.append(f"{ModelFailureError.MESSAGE}; reporting L = 0")
        return _empty_report(e, n_samples, gamma, notes)
    if delta <= 0 and np.any(e > delta):
        # numerically-zero bulk: move the cut into the empty gap, same partition
        smallest_spike = float(e[e > delta].min())
        if smallest_spike > 0:
            notes.append(f"delta {delta:.3g} is not positive; moved to {smallest_spike / 2:.3g}")
            delta = smallest_spike / 2

    eps_prime = cfg.epsilon_prime if cfg.epsilon_prime is not None else cfg.epsilon_prime_fraction * e[0]
    eps_prime = min(eps_prime, eps0)
    search = choose_epsilon(
        e, delta, eps0, n_samples, data_mean,
        mc_samples=cfg.mc_samples, dist=cfg.dist, stop_rule=cfg.stop_rule,
        fraction_p=cfg.fraction_p, epsilon_prime=eps_prime, discrepancy=cfg.discrepancy,
        max_candidates=cfg.max_candidates, center=cfg.center, seed=cfg.seed,
    )
    notes.extend(search.warnings)
    eps = search.epsilon

    bulk = estimate_bulk(e, delta)
    groups, estimates, means = [], [], []
    for g in group_eigenvalues(e, delta, eps):
        try:
            est = estimate_spike_group(e, g, n_samples, k, eps_prime)
        except EstimationError as exc:
            notes.append(f"group at {e[g].mean():.4g} dropped: {exc}")
            continue
        if est <= bulk:
            notes.append(f"group at {e[g].mean():.4g} dropped: estimate {est:.4g} not above bulk {bulk:.4g}")
            continue
        groups.append(tuple(int(i) for i in g))
        estimates.append(est)
        means.append(float(e[g].mean()))

    assumption = []
    if estimates:
        gap = estimates[-1] - bulk
        if gap <= math.sqrt(gamma):
            assumption.append(
                f"spike/bulk gap {gap:.4g} does not exceed sqrt(K/T) = {math.sqrt(gamma):.4g}"
            )
        spike_gaps = [a - b for a, b in zip(estimates, estimates[1:])]
        if spike_gaps and min(spike_gaps) < eps0:
            assumption.append(
                f"smallest adjacent spike gap {min(spike_gaps):.4g} is below epsilon0 = {eps0:.4g}"
            )

    return IDReport(
        L=len(estimates),
        estimated_spikes=tuple(estimates),
        groups=tuple(groups),
        group_means=tuple(means),
        bulk_estimate=bulk,
        thresholds=Thresholds(delta=delta, epsilon=eps, epsilon0=eps0, epsilon_prime=eps_prime),
        gamma_T=gamma,
        sample_eigenvalues=e,
        n_samples=n_samples,
        epsilon_candidates=search.candidates,
        discrepancy_trace=search.discrepancies,
        assumption_warnings=tuple(assumption),
        warnings=tuple(notes),
    )


def _noise_matrix(noise) -> CovarianceMatrix | NDArray[np.float64]:
    # accepts NoiseEstimate without importing the noise module
    return getattr(noise, "covariance", noise)


def intrinsic_dimensionality(
    data: DataMatrix | ArrayLike,
    noise: CovarianceMatrix | ArrayLike | None = None,
    config: IDConfig | None = None,
) -> IDReport:
    """Estimate the number of distinct spiked population eigenvalues.

    Parameters
    ----------
    data : DataMatrix or array_like
        ``K x T`` recording.
    noise : CovarianceMatrix, NoiseEstimate or array_like, optional
        Noise covariance used to whiten the data.  Without it the data
        covariance is analysed directly (the negligible-noise branch) after
        rescaling to spectral norm ``K``.
    config : IDConfig, optional
    """
    cfg = config or IDConfig()
    d = as_data(data)
    notes: list[str] = []
    if noise is not None:
        w = whitener_from_noise(_noise_matrix(noise), cfg.eig_floor)
        if w.dim != d.n_channels:
            raise ValueError(f"noise covariance is {w.dim}x{w.dim} but data has {d.n_channels} channels")
        if w.floor_applied:
            notes.append("noise eigenvalues floored before whitening")
        z = d.with_values(w.apply(d.values))
    else:
        z = d
        if cfg.normalize:
            z = normalize_data(z, sample_covariance(z, center=cfg.center))
    cov = sample_covariance(z, center=cfg.center)
    eig = eigen_decompose(cov)
    return estimate_from_spectrum(
        eig.eigenvalues, z.n_samples, cfg,
        data_mean=z.values.mean(axis=1), warnings=notes,
    )


def with_config(config: IDConfig | None, **changes) -> IDConfig:
    """Copy of ``config`` (or the defaults) with fields replaced."""
    return replace(config or IDConfig(), **changes)


# --------------------------------------------------------------------------
# synthetic spiked data


def sample_spiked_model(
    spec: SpikedModelSpec,
    n_samples: int,
    dist: Distribution = "gaussian",
    seed: int | None = 0,
    rotate: bool = False,
) -> DataMatrix:
    """Draw ``n_samples`` zero-mean columns with covariance ``O^T diag(spikes, bulk) O``.

    ``O`` is the identity, or a seeded Haar-random orthogonal matrix when
    ``rotate`` is true.  The core draws do not depend on ``rotate``.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples")
    lam = spec.population_eigenvalues()
    x = standard_draws(substream(seed, "spiked-core"), (spec.dim, n_samples), dist, _T_DF)
    y = np.sqrt(lam)[:, None] * x
    if rotate:
        o = ortho_group.rvs(spec.dim, random_state=substream(seed, "spiked-rotation"))
        y = o.T @ y
    return DataMatrix(y, units="arb")
