"""Patch distances, similarity kernels, and noise-corrected dissimilarity.

The dissimilarity between a candidate pixel and the estimated pixel is the
kernel-weighted RMS distance between their patches minus the noise floor
sqrt(2)*sigma, clipped at zero. The split variant measures the distance over
the odd-parity half of each patch only, so the pixels being averaged (even
parity) stay independent of the pixels steering the weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import GrayImage, PixelCoord, reflect_indices

__all__ = [
    "SimilarityKernel",
    "kernel_weight",
    "kernel_matrix",
    "noise_floor",
    "patch_distance",
    "patch_distance_squared",
    "dissimilarity",
    "split_dissimilarity",
    "parity_filter",
]

_KINDS = ("rect", "gauss", "k0")


@dataclass(frozen=True)
class SimilarityKernel:
    """Weighting of patch offsets in the distance: rect, gauss, or k0.

    bandwidth applies to gauss (in pixel^2; defaults to patch_radius^2 at use),
    order applies to k0 (layer count p; defaults to patch_radius at use).
    """

    kind: str = "rect"
    bandwidth: float | None = None
    order: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kernel kind must be one of {_KINDS}, got {self.kind!r}")
        if self.bandwidth is not None and self.bandwidth <= 0.0:
            raise ValueError("gauss bandwidth must be > 0")
        if self.order is not None and self.order < 1:
            raise ValueError("k0 order must be >= 1")

    @classmethod
    def rect(cls) -> "SimilarityKernel":
        return cls("rect")

    @classmethod
    def gauss(cls, bandwidth: float | None = None) -> "SimilarityKernel":
        return cls("gauss", bandwidth=bandwidth)

    @classmethod
    def k0(cls, order: int | None = None) -> "SimilarityKernel":
        return cls("k0", order=order)


def noise_floor(sigma: float) -> float:
    """sqrt(2)*sigma, the expected patch RMS distance between pure-noise patches."""
    return math.sqrt(2.0) * sigma


def _k0_layer_sum(start: int, p: int) -> float:
    return sum(1.0 / (2 * k + 1) ** 2 for k in range(start, p + 1))


def kernel_weight(
    kernel: SimilarityKernel, offset: PixelCoord, center: PixelCoord, patch_radius: int
) -> float:
    """Unnormalized kernel value at a patch offset (the distance divides by the
    kernel sum, so no normalization is applied here)."""
    di = offset.row - center.row
    dj = offset.col - center.col
    if max(abs(di), abs(dj)) > patch_radius:
        raise ValueError("offset lies outside the patch window")
    if kernel.kind == "rect":
        return 1.0
    if kernel.kind == "gauss":
        hg = kernel.bandwidth if kernel.bandwidth is not None else float(patch_radius**2)
        if hg <= 0.0:
            raise ValueError("gauss bandwidth must be > 0")
        return math.exp(-(di * di + dj * dj) / (2.0 * hg))
    # k0: concentric layers weighted 1/(2k+1)^2; the center shares the first layer
    p = kernel.order if kernel.order is not None else patch_radius
    if p < 1:
        raise ValueError("k0 kernel needs patch_radius >= 1 (or an explicit order)")
    ell = max(abs(di), abs(dj))
    return _k0_layer_sum(max(ell, 1), p)


@lru_cache(maxsize=64)
def kernel_matrix(kernel: SimilarityKernel, patch_radius: int) -> tuple[np.ndarray, float]:
    """(2r+1)x(2r+1) kernel values plus their sum (computed once, shared by all
    distance paths so the normalizing constant is bit-identical everywhere)."""
    if patch_radius < 0:
        raise ValueError("patch_radius must be >= 0")
    side = 2 * patch_radius + 1
    mat = np.empty((side, side))
    origin = PixelCoord(0, 0)
    for di in range(-patch_radius, patch_radius + 1):
        for dj in range(-patch_radius, patch_radius + 1):
            mat[di + patch_radius, dj + patch_radius] = kernel_weight(
                kernel, PixelCoord(di, dj), origin, patch_radius
            )
    mat.setflags(write=False)
    return mat, float(np.sum(mat))


def _gather_patch(img: GrayImage, at: PixelCoord, patch_radius: int) -> np.ndarray:
    """Patch values around `at` in row-major offset order, read through the mirror."""
    r = patch_radius
    rows = reflect_indices(np.arange(at.row - r, at.row + r + 1), img.height)
    cols = reflect_indices(np.arange(at.col - r, at.col + r + 1), img.width)
    return img.values[np.ix_(rows, cols)]


def _weighted_mean_square(diff2: np.ndarray, weights: np.ndarray, wsum: float) -> float:
    # Sequential row-major accumulation, matching the filter engine's
    # per-offset loop so scalar and vectorized paths agree bit for bit.
    acc = float(np.cumsum((weights * diff2).ravel())[-1])
    return acc / wsum


def patch_distance_squared(
    img: GrayImage,
    x: PixelCoord,
    x0: PixelCoord,
    patch_radius: int,
    kernel: SimilarityKernel = SimilarityKernel.rect(),
) -> float:
    """Squared kernel-weighted RMS distance (no square root applied)."""
    pat_x = _gather_patch(img, x, patch_radius)
    pat_0 = _gather_patch(img, x0, patch_radius)
    diff = pat_x - pat_0
    mat, wsum = kernel_matrix(kernel, patch_radius)
    return _weighted_mean_square(diff * diff, mat, wsum)


def patch_distance(
    img: GrayImage,
    x: PixelCoord,
    x0: PixelCoord,
    patch_radius: int,
    kernel: SimilarityKernel = SimilarityKernel.rect(),
) -> float:
    """Kernel-weighted RMS distance between the patches at x and x0.

    Kernel weights multiply the squared differences before the square root and
    the result is normalized by the kernel sum; with the rect kernel this is
    the plain 1/sqrt(m) * l2 distance. Symmetric in (x, x0), zero at x = x0.
    """
    return math.sqrt(patch_distance_squared(img, x, x0, patch_radius, kernel))


def dissimilarity(
    img: GrayImage,
    x: PixelCoord,
    x0: PixelCoord,
    patch_radius: int,
    kernel: SimilarityKernel,
    sigma: float,
) -> float:
    """(patch_distance - sqrt(2)*sigma)^+ : zero below the noise floor."""
    if sigma <= 0.0:
        raise ValueError("sigma must be > 0")
    return max(patch_distance(img, x, x0, patch_radius, kernel) - noise_floor(sigma), 0.0)


def split_parity_mask(patch_radius: int) -> np.ndarray:
    """Boolean (2r+1)^2 grid marking odd-parity offsets (checkerboard)."""
    r = patch_radius
    di = np.arange(-r, r + 1)
    return (np.abs(di[:, None] + di[None, :]) % 2).astype(bool)


def split_dissimilarity(
    img: GrayImage, x: PixelCoord, x0: PixelCoord, patch_radius: int, sigma: float
) -> float:
    """Dissimilarity measured over the odd-parity patch offsets only.

    The RMS is taken over the m'' odd-parity offsets with unit weights;
    requires patch_radius >= 1 so that set is nonempty.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be > 0")
    if patch_radius < 1:
        raise ValueError("split dissimilarity needs patch_radius >= 1")
    pat_x = _gather_patch(img, x, patch_radius)
    pat_0 = _gather_patch(img, x0, patch_radius)
    diff = pat_x - pat_0
    mask = split_parity_mask(patch_radius)
    d2 = _weighted_mean_square(diff * diff, mask.astype(np.float64), float(mask.sum()))
    return max(math.sqrt(d2) - noise_floor(sigma), 0.0)


def parity_filter(
    coords: list[PixelCoord], origin: PixelCoord, parity: str
) -> list[PixelCoord]:
    """Coordinates whose offset from origin has the requested coordinate-sum
    parity ("even" or "odd"); order preserved."""
    if parity not in ("even", "odd"):
        raise ValueError('parity must be "even" or "odd"')
    want = 0 if parity == "even" else 1
    return [
        c for c in coords if ((c.row - origin.row) + (c.col - origin.col)) % 2 == want
    ]
