"""Reproducible synthetic box weights drawn from a normal distribution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "WeightDistribution",
    "GENERATOR_ID",
    "PRESETS",
    "DEFAULT_MEAN",
    "generate_weights",
    "resolve_std_dev",
]

# numpy Generator(PCG64) seeded directly from the 64-bit seed; Generator.normal
# uses the ziggurat method. Recorded in config.json alongside every run.
GENERATOR_ID = "numpy.random.Generator(PCG64).normal+rint+clamp1"

DEFAULT_MEAN = 100000.0
PRESETS = {"small": 250.0, "medium": 4523.0, "large": 25231.0}


@dataclass(frozen=True)
class WeightDistribution:
    mean: float = DEFAULT_MEAN
    std_dev: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.mean > 0:
            raise ValueError(f"mean must be positive, got {self.mean}")
        if self.std_dev < 0:
            raise ValueError(f"std_dev must be non-negative, got {self.std_dev}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")


def resolve_std_dev(value: str | float) -> float:
    """Map a preset name (small/medium/large) or a number to a standard deviation."""
    if isinstance(value, str):
        key = value.strip().lower()
        if key in PRESETS:
            return PRESETS[key]
        value = float(key)
    value = float(value)
    if value < 0:
        raise ValueError(f"standard deviation must be non-negative, got {value}")
    return value


def generate_weights(dist: WeightDistribution, count: int) -> np.ndarray:
    """Draw ``count`` integer weights, rounded to nearest and clamped to >= 1.

    Non-positive samples are clamped rather than redrawn so the output length
    and the generator stream stay fixed for a given seed.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.Generator(np.random.PCG64(dist.seed))
    samples = rng.normal(dist.mean, dist.std_dev, size=count)
    weights = np.rint(samples).astype(np.int64)
    np.maximum(weights, 1, out=weights)
    return weights
