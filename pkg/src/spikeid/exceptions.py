"""Exception hierarchy shared by every module."""


class SpikeIDError(Exception):
    """Base class for all package errors."""


class DataQualityError(SpikeIDError, ValueError):
    """Input data is malformed: non-finite values, wrong shape, bad file."""


class DegenerateInputError(SpikeIDError, ValueError):
    """Input is well-formed but numerically degenerate (zero norm, zero variance)."""


class NumericalFailureError(SpikeIDError, ArithmeticError):
    """A numerical routine did not converge."""


class EstimationError(SpikeIDError, ArithmeticError):
    """The spike estimator hit a division degeneracy or an invalid group."""


class ModelFailureError(SpikeIDError):
    """The eigenvalue spectrum has no detectable spike/bulk separation."""

    MESSAGE = "The spiked eigenvalues model cannot be employed"

    def __init__(self, message: str = MESSAGE):
        super().__init__(message)


class ConfigError(SpikeIDError, ValueError):
    """Invalid run configuration."""
