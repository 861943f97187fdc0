"""Source counting in multichannel recordings from spiked eigenvalues of the whitened covariance."""

__version__ = "0.1.0"

from .baselines import CriterionCurve, aic_count, eif_count, mdl_count, pca_count
from .core import (
    CovarianceMatrix,
    DataMatrix,
    EigenDecomposition,
    eigen_decompose,
    normalize_covariance,
    normalize_data,
    sample_covariance,
    sample_spectrum,
)
from .exceptions import (
    ConfigError,
    DataQualityError,
    DegenerateInputError,
    EstimationError,
    ModelFailureError,
    NumericalFailureError,
    SpikeIDError,
)
from .noise import NoiseEstimate, estimate_noise
from .simulator import Dipole, HeadModel, SensorArray, SimulationConfig, simulate, reference_dipoles
from .snr import adjusted_covariance, optimality_report, perturbation_curve, whitener_from_noise
from .spike import IDConfig, IDReport, SpikedModelSpec, intrinsic_dimensionality, sample_spiked_model
from .windows import WindowSeries, sliding_id

__all__ = [
    "__version__",
    "CriterionCurve",
    "aic_count",
    "eif_count",
    "mdl_count",
    "pca_count",
    "CovarianceMatrix",
    "DataMatrix",
    "EigenDecomposition",
    "eigen_decompose",
    "normalize_covariance",
    "normalize_data",
    "sample_covariance",
    "sample_spectrum",
    "ConfigError",
    "DataQualityError",
    "DegenerateInputError",
    "EstimationError",
    "ModelFailureError",
    "NumericalFailureError",
    "SpikeIDError",
    "NoiseEstimate",
    "estimate_noise",
    "Dipole",
    "HeadModel",
    "SensorArray",
    "SimulationConfig",
    "simulate",
    "reference_dipoles",
    "adjusted_covariance",
    "optimality_report",
    "perturbation_curve",
    "whitener_from_noise",
    "IDConfig",
    "IDReport",
    "SpikedModelSpec",
    "intrinsic_dimensionality",
    "sample_spiked_model",
    "WindowSeries",
    "sliding_id",
]
