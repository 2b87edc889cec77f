"""Seeded additive Gaussian noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GrayImage

__all__ = ["NoiseSpec", "add_noise"]


@dataclass(frozen=True)
class NoiseSpec:
    """Noise standard deviation and the 64-bit generator seed."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError("sigma must be > 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


def add_noise(clean: GrayImage, spec: NoiseSpec) -> GrayImage:
    """clean + sigma * z with z i.i.d. standard normal.

    One variate per pixel in row-major order from a PCG64 generator, so the
    same (image, sigma, seed) always produces bit-identical output. Values are
    not clamped.
    """
    rng = np.random.default_rng(spec.seed)
    z = rng.standard_normal(clean.values.shape)
    return GrayImage(clean.values + spec.sigma * z)
