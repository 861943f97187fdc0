import numpy as np
import pytest

from spikeid.core import (
    CovarianceMatrix,
    DataMatrix,
    eigen_decompose,
    normalize_covariance,
    normalize_data,
    sample_covariance,
    sample_spectrum,
    spectral_norm,
)
from spikeid.exceptions import DataQualityError, DegenerateInputError


def test_data_matrix_rejects_non_finite_with_position():
    y = np.ones((3, 4))
    y[1, 2] = np.nan
    with pytest.raises(DataQualityError, match="channel 1, sample 2"):
        DataMatrix(y)


def test_data_matrix_shape_checks():
    with pytest.raises(DataQualityError):
        DataMatrix(np.ones(5))
    with pytest.raises(DataQualityError):
        DataMatrix(np.ones((1, 5)))
    d = DataMatrix(np.ones((2, 5)), sample_period_ms=2.0)
    assert (d.n_channels, d.n_samples, d.duration_ms) == (2, 5, 10.0)
    assert not d.values.flags.writeable


def test_covariance_symmetry_and_psd_checks():
    with pytest.raises(DataQualityError):
        CovarianceMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DataQualityError):
        CovarianceMatrix(np.array([[1.0, 0.0], [0.0, -1.0]]))
    c = CovarianceMatrix(np.array([[2.0, 1.0], [1.0 + 1e-12, 2.0]]))
    assert np.array_equal(c.values, c.values.T)


def test_sample_covariance_uses_one_over_t():
    y = np.array([[1.0, -1.0, 1.0, -1.0], [2.0, 2.0, -2.0, -2.0]])
    c = sample_covariance(y).values
    assert np.allclose(c, [[1.0, 0.0], [0.0, 4.0]])
    unc = sample_covariance(y + 1.0, center=False).values
    assert unc[0, 0] == pytest.approx(2.0)


def test_eigen_decompose_sorted_and_reconstructs():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((6, 6))
    m = a @ a.T
    eig = eigen_decompose(m)
    assert np.all(np.diff(eig.eigenvalues) <= 0)
    assert np.allclose(eig.reconstruct(), m)
    # deterministic sign: largest-magnitude entry of each vector is positive
    idx = np.argmax(np.abs(eig.eigenvectors), axis=0)
    assert np.all(eig.eigenvectors[idx, np.arange(6)] > 0)


def test_sample_spectrum_matches_eigenvalues_and_is_nonnegative():
    rng = np.random.default_rng(0)
    y = rng.standard_normal((5, 200))
    assert np.allclose(sample_spectrum(y), eigen_decompose(sample_covariance(y)).eigenvalues)
    low_rank = np.outer(rng.standard_normal(8), rng.standard_normal(100))
    assert np.all(sample_spectrum(low_rank) >= 0)


@pytest.mark.parametrize("mode,target", [("one", 1.0), ("K", 4.0), ("K_squared", 16.0)])
def test_normalize_covariance_modes(mode, target):
    c = np.diag([8.0, 3.0, 2.0, 1.0])
    out = normalize_covariance(c, mode)
    assert spectral_norm(out) == pytest.approx(target)


def test_normalize_data_gives_norm_k():
    rng = np.random.default_rng(1)
    y = 1e-13 * rng.standard_normal((4, 500))
    z = normalize_data(y, sample_covariance(y))
    assert spectral_norm(sample_covariance(z)) == pytest.approx(4.0)


def test_zero_covariance_cannot_be_normalized():
    with pytest.raises(DegenerateInputError):
        normalize_covariance(np.zeros((3, 3)))
