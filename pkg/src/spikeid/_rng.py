"""Named, reproducible random substreams derived from one master seed."""

from __future__ import annotations

import zlib

import numpy as np


def substream(seed: int | None, *names: str | int) -> np.random.Generator:
    """Generator keyed by ``(seed, *names)``; independent of call order."""
    key = [zlib.crc32(str(n).encode()) for n in names]
    root = 0 if seed is None else int(seed)
    return np.random.default_rng(np.random.SeedSequence(root, spawn_key=tuple(key)))


def standard_draws(rng: np.random.Generator, shape, dist: str = "gaussian", df: int = 5) -> np.ndarray:
    """Zero-mean, unit-variance draws from ``gaussian``, ``uniform`` or Student ``t``."""
    if dist == "gaussian":
        return rng.standard_normal(shape)
    if dist == "uniform":
        return rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size=shape)
    if dist == "t":
        if df <= 4:
            raise ValueError("t draws need df > 4 for a finite fourth moment")
        return rng.standard_t(df, size=shape) / np.sqrt(df / (df - 2.0))
    raise ValueError(f"unknown distribution {dist!r}")
