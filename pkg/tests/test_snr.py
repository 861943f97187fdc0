import numpy as np
import pytest

from spikeid.exceptions import DegenerateInputError
from spikeid.snr import (
    adjusted_covariance,
    loglog_slope,
    optimality_report,
    perturbation_curve,
    snr_functional,
    whitener_from_noise,
)


def _random_pd(rng, k, cond=100.0):
    q, _ = np.linalg.qr(rng.standard_normal((k, k)))
    lam = np.geomspace(1.0, cond, k)
    return (q * lam) @ q.T


def test_whitening_pure_noise_gives_identity():
    rng = np.random.default_rng(0)
    rn = _random_pd(rng, 6)
    w = whitener_from_noise(rn)
    assert np.allclose(adjusted_covariance(rn, w).matrix, np.eye(6), atol=1e-10)


def test_diagonal_hand_example():
    w = whitener_from_noise(np.diag([1.0, 2.0]))
    adj = adjusted_covariance(np.diag([5.0, 2.0]), w).matrix
    assert np.allclose(np.sort(np.diag(adj)), [1.0, 5.0])
    assert np.allclose(adj - np.diag(np.diag(adj)), 0.0)


def test_low_rank_signal_leaves_unit_bulk():
    rng = np.random.default_rng(1)
    k, m = 12, 3
    rn = _random_pd(rng, k)
    g = rng.standard_normal((k, m))
    r = g @ g.T + rn
    w = whitener_from_noise(rn)
    lam = np.linalg.eigvalsh(adjusted_covariance(r, w).matrix)
    assert np.allclose(lam[: k - m], 1.0, atol=1e-8)
    assert np.all(lam[k - m :] > 1.0)


def test_scaled_identity_report():
    rep = optimality_report(2 * np.eye(3), np.eye(3))
    assert rep.lambda_max == pytest.approx(2.0)
    assert rep.value_whitener == pytest.approx(2.0)
    assert rep.value_rotated == pytest.approx(2.0)


def test_functional_rejects_vanishing_noise_term():
    with pytest.raises(DegenerateInputError):
        snr_functional(np.array([[1.0], [0.0]]), np.eye(2), np.diag([0.0, 1.0]))


def test_zero_noise_covariance_rejected():
    with pytest.raises(DegenerateInputError):
        whitener_from_noise(np.zeros((3, 3)))


def test_floor_applied_for_singular_noise():
    w = whitener_from_noise(np.diag([1.0, 0.0]), eig_floor=1e-6)
    assert w.floor_applied
    assert np.all(np.isfinite(w.matrix))


def test_perturbation_curve_basics():
    rng = np.random.default_rng(2)
    r, rn = _random_pd(rng, 8), _random_pd(rng, 8)
    curve = perturbation_curve(r, rn, [0.0, 1e-6, 1e-5, 1e-4], seed=5)
    assert curve[0] == (0.0, 0.0)
    assert all(d > 0 for _, d in curve[1:])
    assert 0.8 <= loglog_slope(curve) <= 1.2
    assert curve == perturbation_curve(r, rn, [0.0, 1e-6, 1e-5, 1e-4], seed=5)


@pytest.mark.parametrize("omegas", [[], [-1e-3], [10.0]])
def test_perturbation_curve_rejects_bad_omegas(omegas):
    with pytest.raises(ValueError):
        perturbation_curve(np.eye(3), np.eye(3), omegas)
