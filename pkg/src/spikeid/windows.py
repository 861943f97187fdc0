"""Sliding-window intrinsic dimensionality for tracking source counts over time."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DataMatrix, as_data
from .exceptions import ConfigError
from .noise import NoiseEstimate, estimate_noise
from .spike import IDConfig, IDReport, intrinsic_dimensionality

__all__ = ["WindowEstimate", "WindowSeries", "window_starts", "ms_to_samples", "sliding_id", "estimate_id"]


@dataclass(frozen=True)
class WindowEstimate:
    t_start_ms: float
    t_end_ms: float
    report: IDReport

    @property
    def L(self) -> int:
        return self.report.L


@dataclass(frozen=True)
class WindowSeries:
    """Ordered per-window estimates; consecutive starts differ by ``stride_ms``."""

    scheme: str
    window_ms: float
    stride_ms: float
    windows: tuple[WindowEstimate, ...]

    def __post_init__(self) -> None:
        starts = [w.t_start_ms for w in self.windows]
        if any(abs((b - a) - self.stride_ms) > 1e-9 * max(1.0, self.stride_ms) for a, b in zip(starts, starts[1:])):
            raise ValueError("window starts must be spaced by the stride")

    def counts(self) -> list[int]:
        return [w.L for w in self.windows]

    def rows(self) -> list[tuple[float, float, int]]:
        return [(w.t_start_ms, w.t_end_ms, w.L) for w in self.windows]


def ms_to_samples(ms: float, sample_period_ms: float, what: str = "duration") -> int:
    """Convert a duration to a whole number of samples, refusing fractional results."""
    n = ms / sample_period_ms
    r = round(n)
    if r < 1 or abs(n - r) > 1e-9 * max(1.0, n):
        raise ConfigError(f"{what} {ms:g} ms is not a positive whole number of {sample_period_ms:g} ms samples")
    return int(r)


def window_starts(n_samples: int, window: int, stride: int) -> list[int]:
    """Start indices of every full window: ``floor((T - w) / s) + 1`` of them."""
    if window < 2:
        raise ConfigError("window must span at least two samples")
    if stride < 1:
        raise ConfigError("stride must be at least one sample")
    if stride > window:
        raise ConfigError("stride must not exceed the window length")
    if window > n_samples:
        raise ConfigError(f"window of {window} samples is longer than the recording ({n_samples})")
    return list(range(0, n_samples - window + 1, stride))


def estimate_id(
    data: DataMatrix,
    noise_method: str = "fft",
    config: IDConfig | None = None,
    noise: NoiseEstimate | None = None,
    noise_params: dict | None = None,
) -> IDReport:
    """Whiten with the chosen noise estimator (``"none"`` skips whitening) and estimate ``L``."""
    if noise is None and noise_method != "none":
        noise = estimate_noise(data, noise_method, **(noise_params or {}))
    return intrinsic_dimensionality(data, noise, config)


def sliding_id(
    data: DataMatrix,
    window_ms: float = 2000.0,
    stride_ms: float = 600.0,
    noise_method: str = "fft",
    config: IDConfig | None = None,
    global_noise: bool = False,
    noise_params: dict | None = None,
    scheme: str = "moving",
) -> WindowSeries:
    """Estimate ``L`` on every full window of ``window_ms`` advanced by ``stride_ms``.

    The noise covariance is re-estimated inside each window unless
    ``global_noise`` is set, in which case one estimate from the whole
    recording whitens every window.
    """
    d = as_data(data)
    if not (math.isfinite(window_ms) and math.isfinite(stride_ms)):
        raise ConfigError("window and stride must be finite")
    w = ms_to_samples(window_ms, d.sample_period_ms, "window")
    s = ms_to_samples(stride_ms, d.sample_period_ms, "stride")
    starts = window_starts(d.n_samples, w, s)
    shared = None
    if global_noise and noise_method != "none":
        shared = estimate_noise(d, noise_method, **(noise_params or {}))
    out = []
    for start in starts:
        seg = d.with_values(d.values[:, start : start + w])
        rep = estimate_id(seg, noise_method, config, shared, noise_params)
        out.append(WindowEstimate(start * d.sample_period_ms, (start + w) * d.sample_period_ms, rep))
    return WindowSeries(scheme, window_ms, stride_ms, tuple(out))
