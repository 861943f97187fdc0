"""Synthetic MEG recordings from current dipoles in a spherical head.

Sensors sit uniformly at random on the upper hemisphere of a 100 mm sphere.
Each dipole contributes the primary-current Biot-Savart field

    B(p) = (mu0 / 4 pi) * q x (p - r0) / |p - r0|**3

projected on the sensor's measurement direction and modulated by its own
time course.  Every trial adds channel-wise Gaussian noise whose variance is
the channel's signal variance divided by the SNR, and trials are averaged.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ._rng import substream
from .core import DataMatrix
from .exceptions import ConfigError

__all__ = [
    "Dipole",
    "SensorArray",
    "HeadModel",
    "SimulationConfig",
    "SimulationResult",
    "place_sensors",
    "dipole_field",
    "dipole_field_radial",
    "lead_field",
    "time_course",
    "simulate",
    "reference_dipoles",
    "REFERENCE_DIPOLE_PARAMS",
]

MU0_OVER_4PI = 1e-7  # T m / A
_NAM = 1e-9  # nA*m -> A*m
_MM = 1e-3
_FT = 1e15

Orientation = Literal["radial", "z"]


@dataclass(frozen=True)
class HeadModel:
    """Three concentric spheres (brain, skull, scalp).

    Kept for configuration fidelity only: the fields computed here are the
    primary-current term, which the conductivities do not enter.
    """

    radii: tuple[float, float, float] = (88.0, 92.0, 100.0)
    conductivities: tuple[float, float, float] = (1.0, 1.0 / 80.0, 1.0)

    def __post_init__(self) -> None:
        if not all(a < b for a, b in zip(self.radii, self.radii[1:])) or self.radii[0] <= 0:
            raise ValueError("head radii must be positive and strictly increasing")
        if any(c <= 0 for c in self.conductivities):
            raise ValueError("conductivities must be positive")

    @property
    def brain_radius(self) -> float:
        return self.radii[0]


@dataclass(frozen=True, eq=False)
class Dipole:
    """Current dipole: position in mm, moment in nA*m.

    ``table_params`` keeps the original tabulated parameters when the
    dipole came from :func:`reference_dipoles`.
    """

    position: NDArray[np.float64]
    moment: NDArray[np.float64]
    table_params: dict | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        pos = np.array(self.position, dtype=float).reshape(3)
        mom = np.array(self.moment, dtype=float).reshape(3)
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(mom))):
            raise ValueError("dipole position and moment must be finite")
        pos.setflags(write=False)
        mom.setflags(write=False)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "moment", mom)

    @classmethod
    def from_spherical(cls, r: float, theta: float, phi: float, moment: ArrayLike, **kw) -> "Dipole":
        """Position ``r (sin t cos p, sin t sin p, cos t)``; angles in radians."""
        pos = r * np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
        return cls(pos, np.asarray(moment, dtype=float), **kw)

    def check_inside(self, head: HeadModel) -> None:
        if np.linalg.norm(self.position) >= head.brain_radius:
            raise ValueError(f"dipole at {self.position} lies outside the brain sphere")


@dataclass(frozen=True, eq=False)
class SensorArray:
    """Point magnetometers on a sphere.

    ``orientations`` are the measured field directions: the outward radial
    unit vectors by default, or the global ``z`` axis for every sensor.
    """

    positions: NDArray[np.float64]
    orientations: NDArray[np.float64]
    radius: float = 100.0

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=float)
        ori = np.array(self.orientations, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or ori.shape != pos.shape:
            raise ValueError("positions and orientations must both be N x 3")
        if np.any(np.abs(np.linalg.norm(pos, axis=1) - self.radius) > 1e-9):
            raise ValueError(f"every sensor must lie on the sphere of radius {self.radius}")
        if np.any(pos[:, 2] < 0):
            raise ValueError("sensors must lie on the upper hemisphere (z >= 0)")
        if np.any(np.abs(np.linalg.norm(ori, axis=1) - 1.0) > 1e-9):
            raise ValueError("orientations must be unit vectors")
        pos.setflags(write=False)
        ori.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "orientations", ori)

    @property
    def n_sensors(self) -> int:
        return self.positions.shape[0]

    def with_orientation(self, orientation: Orientation) -> "SensorArray":
        return SensorArray(self.positions, _orientations(self.positions, orientation), self.radius)


def _orientations(pos: NDArray[np.float64], orientation: str) -> NDArray[np.float64]:
    if orientation == "radial":
        return pos / np.linalg.norm(pos, axis=1, keepdims=True)
    if orientation == "z":
        return np.tile([0.0, 0.0, 1.0], (pos.shape[0], 1))
    raise ValueError(f"unknown sensor orientation {orientation!r}")


def place_sensors(n: int, radius: float = 100.0, seed: int | None = 0,
                  orientation: Orientation = "radial") -> SensorArray:
    """``n`` sensors uniform on the upper hemisphere (area measure)."""
    if n < 1:
        raise ValueError("need at least one sensor")
    if not radius > 0:
        raise ValueError("radius must be positive")
    rng = substream(seed, "sensors")
    z = rng.uniform(0.0, 1.0, n)  # uniform z gives uniform area on a sphere
    az = rng.uniform(0.0, 2 * math.pi, n)
    rho = np.sqrt(1.0 - z**2)
    unit = np.column_stack([rho * np.cos(az), rho * np.sin(az), z])
    unit /= np.linalg.norm(unit, axis=1, keepdims=True)
    pos = radius * unit
    return SensorArray(pos, _orientations(pos, orientation), radius)


def dipole_field(dipole: Dipole, position: ArrayLike) -> NDArray[np.float64]:
    """Primary-current magnetic field vector (fT) at ``position`` (mm)."""
    p = np.asarray(position, dtype=float)
    d = (p - dipole.position) * _MM
    dist = float(np.linalg.norm(d))
    if dist < 1e-12:
        raise ValueError("sensor coincides with the dipole position")
    b = MU0_OVER_4PI * np.cross(dipole.moment * _NAM, d) / dist**3
    return b * _FT


def dipole_field_radial(dipole: Dipole, position: ArrayLike, orientation: ArrayLike | None = None) -> float:
    """Field component along ``orientation`` (outward radial when omitted), in fT."""
    p = np.asarray(position, dtype=float)
    e = p / np.linalg.norm(p) if orientation is None else np.asarray(orientation, dtype=float)
    return float(dipole_field(dipole, p) @ e)


def lead_field(dipoles: Sequence[Dipole], sensors: SensorArray) -> NDArray[np.float64]:
    """``K x D`` gain matrix: measured field per unit time course."""
    g = np.empty((sensors.n_sensors, len(dipoles)))
    for j, dip in enumerate(dipoles):
        for i in range(sensors.n_sensors):
            g[i, j] = dipole_field_radial(dip, sensors.positions[i], sensors.orientations[i])
    return g


_COURSES: tuple[Callable[[NDArray[np.float64]], NDArray[np.float64]], ...] = (
    lambda t: np.sin(2 * np.pi * 10 * t),
    lambda t: np.cos(2 * np.pi * 15 * t),
    lambda t: np.sin(2 * np.pi * 20 * t - np.pi / 4),
    lambda t: np.cos(2 * np.pi * 30 * t - np.pi / 4),
)


def time_course(index: int, t: ArrayLike, sample_period_s: float = 1e-3) -> NDArray[np.float64] | float:
    """Oscillation ``index`` (1..4) at sample index ``t``.

    The waveforms are 10, 15, 20 and 30 Hz oscillations; sample ``t`` sits
    at ``t * sample_period_s`` seconds.
    """
    if not 1 <= index <= len(_COURSES):
        raise ValueError(f"time course index must be in 1..{len(_COURSES)}")
    out = _COURSES[index - 1](np.asarray(t, dtype=float) * sample_period_s)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SimulationConfig:
    """Everything :func:`simulate` needs.

    ``sensors`` wins over ``n_sensors``; ``courses`` may supply one callable
    per dipole mapping a sample-index array to amplitudes, otherwise the
    built-in oscillations are used in order.
    """

    dipoles: tuple[Dipole, ...]
    sensors: SensorArray | None = None
    n_sensors: int = 128
    head: HeadModel = field(default_factory=HeadModel)
    n_samples: int = 1000
    snr: float = math.inf
    n_trials: int = 5
    seed: int = 0
    sample_period_ms: float = 1.0
    orientation: Orientation = "radial"
    courses: tuple[Callable, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "dipoles", tuple(self.dipoles))
        if not self.dipoles:
            raise ConfigError("need at least one dipole")
        if not self.snr > 0:
            raise ConfigError("snr must be positive (use inf for noise-free data)")
        if self.n_samples < 2:
            raise ConfigError("need at least two samples")
        if self.n_trials < 1:
            raise ConfigError("need at least one trial")
        if self.courses is None and len(self.dipoles) > len(_COURSES):
            raise ConfigError(f"only {len(_COURSES)} built-in time courses; supply courses for more dipoles")
        if self.courses is not None and len(self.courses) != len(self.dipoles):
            raise ConfigError("need one time course per dipole")
        for d in self.dipoles:
            d.check_inside(self.head)

    def sensor_array(self) -> SensorArray:
        if self.sensors is not None:
            return self.sensors
        return place_sensors(self.n_sensors, self.head.radii[-1], self.seed, self.orientation)


@dataclass(frozen=True)
class SimulationResult:
    averaged: DataMatrix
    trials: tuple[DataMatrix, ...]
    clean_signal: NDArray[np.float64]
    n_dipoles: int
    noise_variances: NDArray[np.float64]
    sensors: SensorArray
    warnings: tuple[str, ...] = ()


def simulate(config: SimulationConfig) -> SimulationResult:
    """Clean dipole mixture plus SNR-scaled noise, averaged over trials."""
    sensors = config.sensor_array()
    t = np.arange(1, config.n_samples + 1)
    period_s = config.sample_period_ms * 1e-3
    if config.courses is None:
        courses = np.vstack([time_course(i + 1, t, period_s) for i in range(len(config.dipoles))])
    else:
        courses = np.vstack([np.asarray(c(t), dtype=float) for c in config.courses])
    clean = lead_field(config.dipoles, sensors) @ courses
    notes = []
    if math.isinf(config.snr):
        noise_var = np.zeros(sensors.n_sensors)
    else:
        noise_var = np.var(clean, axis=1) / config.snr
        silent = np.flatnonzero(noise_var == 0)
        if silent.size:
            notes.append(f"{silent.size} channel(s) carry no signal; their noise variance is 0")
    trials = []
    for k in range(config.n_trials):
        rng = substream(config.seed, "trial", k)
        noise = rng.standard_normal(clean.shape) * np.sqrt(noise_var)[:, None]
        trials.append(DataMatrix(clean + noise, config.sample_period_ms))
    avg = DataMatrix(np.mean([tr.values for tr in trials], axis=0), config.sample_period_ms)
    return SimulationResult(avg, tuple(trials), clean, len(config.dipoles), noise_var, sensors, tuple(notes))


# (r mm, phi, theta, m1, m2, s) per dipole
REFERENCE_DIPOLE_PARAMS: tuple[dict, ...] = (
    {"r": 0.0, "phi": 0.5, "theta": 3.0, "m1": 1.0, "m2": 0.0, "s": 0.0},
    {"r": 10.0, "phi": 0.1, "theta": 0.1, "m1": 0.0, "m2": 0.5, "s": 0.5},
    {"r": -10.0, "phi": -0.5, "theta": -0.3, "m1": 0.3, "m2": 0.4, "s": 0.2},
    {"r": 40.0, "phi": -0.3, "theta": 0.3, "m1": 1.0, "m2": 0.7, "s": 0.0},
)


def reference_dipoles(unit_moment_nam: float = 10.0, params: Sequence[dict] = REFERENCE_DIPOLE_PARAMS,
                   warn: bool = True) -> tuple[Dipole, ...]:
    """Four dipoles from the tabulated ``(r, phi, theta, m1, m2, s)`` parameters.

    Mapping (angles in radians):

    * position ``r (sin t cos p, sin t sin p, cos t)``; a negative ``r``
      reflects through the origin;
    * moment ``A (m1 e_theta + m2 e_phi)`` in the local tangent basis with
      ``A = unit_moment_nam * s`` when ``s > 0`` and ``A = unit_moment_nam``
      when ``s = 0``.
    """
    out = []
    notes = ["angles interpreted as radians"]
    for i, prm in enumerate(params, start=1):
        r, ph, th = prm["r"], prm["phi"], prm["theta"]
        e_theta = np.array([math.cos(th) * math.cos(ph), math.cos(th) * math.sin(ph), -math.sin(th)])
        e_phi = np.array([-math.sin(ph), math.cos(ph), 0.0])
        amp = unit_moment_nam * (prm["s"] if prm["s"] > 0 else 1.0)
        moment = amp * (prm["m1"] * e_theta + prm["m2"] * e_phi)
        if r == 0:
            notes.append(f"dipole {i} sits at the origin; its radial field is identically zero")
        if r < 0:
            notes.append(f"dipole {i} has negative r; position reflected through the origin")
        out.append(Dipole.from_spherical(r, th, ph, moment, table_params=dict(prm)))
    if warn:
        for n in notes:
            _warnings.warn(n, stacklevel=2)
    return tuple(out)
