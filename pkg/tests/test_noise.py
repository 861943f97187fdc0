import numpy as np
import pytest

from spikeid.core import DataMatrix
from spikeid.exceptions import ConfigError, DataQualityError, DegenerateInputError
from spikeid.noise import (
    estimate_noise,
    estimate_noise_fft,
    estimate_noise_residual,
    estimate_noise_threshold,
)

SIGMA = np.array([0.5, 1.0, 2.0, 3.0])


def _noisy_sines(t=8000, seed=0):
    rng = np.random.default_rng(seed)
    n = np.arange(t)
    signal = np.vstack([5 * np.sin(2 * np.pi * f * n / 1000) for f in (10, 15, 20, 30)])
    return DataMatrix(signal + SIGMA[:, None] * rng.standard_normal((4, t)))


def test_fft_recovers_noise_variance_under_low_frequency_signal():
    est = estimate_noise(_noisy_sines(), "fft")
    assert est.variances == pytest.approx(SIGMA**2, rel=0.1)
    assert est.method == "fft"


@pytest.mark.parametrize("method", ["residual", "threshold"])
def test_residual_methods_remove_predictable_signal(method):
    # lagged noisy regressors cannot cancel additive noise, so the estimate
    # sits above the noise variance; at least half the signal power is removed
    y = _noisy_sines()
    est = estimate_noise(y, method)
    total = np.var(y.values, axis=1)
    assert np.all(est.variances > 0.9 * SIGMA**2)
    assert np.all(est.variances < total - 0.5 * 12.5)
    assert np.all(np.diff(est.variances) > 0)


@pytest.mark.parametrize("method", ["fft", "residual", "threshold"])
def test_white_noise_variance_recovered(method):
    rng = np.random.default_rng(6)
    y = DataMatrix(SIGMA[:, None] * rng.standard_normal((4, 10000)))
    assert estimate_noise(y, method).variances == pytest.approx(SIGMA**2, rel=0.05)


def test_fft_periodogram_mean_matches_variance_for_pure_noise():
    rng = np.random.default_rng(1)
    y = DataMatrix(2.0 * rng.standard_normal((3, 20000)))
    assert estimate_noise_fft(y).variances == pytest.approx([4.0] * 3, rel=0.05)


def test_residual_ar0_is_plain_variance_and_precision_reported():
    y = _noisy_sines()
    est = estimate_noise_residual(y, ar_order=0)
    assert est.variances == pytest.approx(np.var(y.values, axis=1))
    assert est.diagnostics["precision"] == pytest.approx(1 / est.variances)


def test_threshold_keeps_strong_correlation_and_stays_pd():
    rng = np.random.default_rng(2)
    z = rng.standard_normal((2, 5000))
    y = np.vstack([z[0], 0.8 * z[0] + 0.6 * z[1], rng.standard_normal((4, 5000))])
    est = estimate_noise_threshold(DataMatrix(y), ar_order=0)
    c = est.covariance.values
    assert c[0, 1] == pytest.approx(0.8, abs=0.05)
    assert c[0, 3] == 0.0
    assert np.linalg.eigvalsh(c)[0] > 0


def test_baseline_restricts_samples():
    rng = np.random.default_rng(3)
    y = rng.standard_normal((2, 4000))
    y[:, 2000:] *= 10
    est = estimate_noise_fft(DataMatrix(y), baseline=(0, 2000))
    assert est.variances == pytest.approx([1.0, 1.0], rel=0.15)


def test_floor_on_silent_channel():
    rng = np.random.default_rng(4)
    y = np.vstack([rng.standard_normal(500), np.zeros(500)])
    est = estimate_noise_fft(DataMatrix(y))
    assert est.warnings and est.variances[1] > 0


def test_errors():
    with pytest.raises(DegenerateInputError):
        estimate_noise_fft(DataMatrix(np.zeros((2, 100))))
    with pytest.raises(ConfigError):
        estimate_noise(_noisy_sines(), "wavelet")
    with pytest.raises(DataQualityError):
        estimate_noise_fft(DataMatrix(np.ones((2, 8)) + np.arange(8)))


def test_brute_is_identity():
    assert np.array_equal(estimate_noise(_noisy_sines(), "brute").covariance.values, np.eye(4))
