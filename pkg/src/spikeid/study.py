"""Side-by-side source counts on simulated recordings across SNR levels."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from .baselines import all_counts
from .core import DataMatrix, sample_spectrum
from .simulator import SimulationConfig, SimulationResult, simulate, reference_dipoles
from .spike import IDConfig
from .windows import estimate_id

__all__ = ["DEFAULT_SNRS", "SPE_METHODS", "COMPARE_COLUMNS", "CompareRow", "compare_counts", "snr_sweep",
           "simulation_config", "snr_label"]

DEFAULT_SNRS = (math.inf, 1.0, 0.1, 0.01, 0.001, 0.0001)
SPE_METHODS = ("fft", "residual", "threshold")
_SPE_NAMES = {"fft": "SPE(FFT)", "residual": "SPE(Residual)", "threshold": "SPE(Threshold)"}
COMPARE_COLUMNS = ("SNR", "PCA(0.9)", "PCA(0.8)", "PCA(0.7)", "AIC", "MDL", "EIF",
                   "SPE(FFT)", "SPE(Residual)", "SPE(Threshold)")


def snr_label(snr: float) -> str:
    return "inf" if math.isinf(snr) else f"{snr:g}"


@dataclass(frozen=True)
class CompareRow:
    snr: float
    counts: dict

    def as_row(self) -> list:
        return [snr_label(self.snr)] + [self.counts[c] for c in COMPARE_COLUMNS[1:]]


def compare_counts(data: DataMatrix, config: IDConfig | None = None,
                   methods: Sequence[str] = SPE_METHODS) -> dict:
    """Baseline counts on the raw spectrum plus the spiked estimate per noise estimator."""
    counts = all_counts(sample_spectrum(data), data.n_samples)
    for m in methods:
        counts[_SPE_NAMES.get(m, f"SPE({m})")] = estimate_id(data, m, config).L
    return counts


def simulation_config(snr: float, seed: int = 0, orientation: str = "radial", **kw) -> SimulationConfig:
    """The four tabulated dipoles under 128 sensors, 1000 samples, 5 trials."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dipoles = reference_dipoles()
    return SimulationConfig(dipoles, snr=snr, seed=seed, orientation=orientation, **kw)


def snr_sweep(snrs: Sequence[float] = DEFAULT_SNRS, seed: int = 0, config: IDConfig | None = None,
              orientation: str = "radial", **sim_kw) -> list[tuple[CompareRow, SimulationResult]]:
    """Simulate each SNR with the same master seed and tabulate every count."""
    out = []
    for snr in snrs:
        res = simulate(simulation_config(snr, seed, orientation, **sim_kw))
        out.append((CompareRow(snr, compare_counts(res.averaged, config)), res))
    return out
