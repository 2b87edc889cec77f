"""Shared test utilities: independent oracles and test-image plumbing.

The oracles here deliberately avoid the library's solution paths: the
bandwidth is found by bisection, the simplex QP by projected gradient with
momentum, and the filter by straight per-pixel loops. They exist to check the
closed-form/vectorized implementations against first principles.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from owf import (
    DissimilarityProfile,
    FilterConfig,
    GrayImage,
    PixelCoord,
    dissimilarity_mass,
    mirror_read,
    optimal_weights,
)
from owf.grid import reflect_indices
from owf.similarity import kernel_matrix, noise_floor

IMAGES_DIR = Path(os.environ.get("OWF_IMAGES", Path(__file__).resolve().parent.parent / "images"))

CANONICAL_SIZES = {
    "lena": (512, 512),
    "barbara": (512, 512),
    "boat": (512, 512),
    "house": (256, 256),
    "peppers": (256, 256),
}


def canonical_image(name: str) -> GrayImage | None:
    """Standard test image by name, or None when not fetched into IMAGES_DIR."""
    for suffix in (".pgm", ".png"):
        path = IMAGES_DIR / f"{name}{suffix}"
        if path.exists():
            from owf import read_image

            img = read_image(path)
            if (img.height, img.width) == CANONICAL_SIZES[name]:
                return img
    return None


def require_canonical(name: str) -> GrayImage:
    import pytest

    img = canonical_image(name)
    if img is None:
        pytest.skip(
            f"standard test image {name!r} not available; run "
            "`python scripts/fetch_images.py` (needs network) to enable this check"
        )
    return img


def camera_image() -> GrayImage:
    """Bundled 512x512 8-bit camera photo from scikit-image."""
    import pytest

    data = pytest.importorskip("skimage.data")
    return GrayImage(data.camera().astype(np.float64))


def clamped(img: GrayImage) -> GrayImage:
    return GrayImage(np.clip(img.values, 0.0, 255.0))


def bisect_bandwidth(rho: np.ndarray, sigma: float, iters: int = 80) -> float:
    """Bisection root of sum rho*(t-rho)^+ = sigma^2; needs a positive entry."""
    profile = DissimilarityProfile(rho)
    total = float(rho.sum())
    assert total > 0.0, "bisection oracle needs a non-degenerate profile"
    lo = 0.0
    hi = float(rho.max()) + sigma * sigma / total + 1.0
    target = sigma * sigma
    assert dissimilarity_mass(profile, hi) >= target
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if dissimilarity_mass(profile, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {w : w >= 0, sum w = 1}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.size + 1)
    admissible = u - (css - 1.0) / idx > 0.0
    k = int(idx[admissible][-1])
    tau = (css[k - 1] - 1.0) / k
    return np.maximum(v - tau, 0.0)


def pg_minimize(rho: np.ndarray, sigma: float, iters: int = 2500) -> np.ndarray:
    """Projected-gradient (FISTA-accelerated) minimizer of the risk bound."""
    n = rho.size
    lips = 2.0 * (float(rho @ rho) + sigma * sigma)
    w = np.full(n, 1.0 / n)
    y = w.copy()
    t = 1.0
    for _ in range(iters):
        grad = 2.0 * float(y @ rho) * rho + 2.0 * sigma * sigma * y
        w_next = project_simplex(y - grad / lips)
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = w_next + ((t - 1.0) / t_next) * (w_next - w)
        w, t = w_next, t_next
    return w


def objective(rho: np.ndarray, w: np.ndarray, sigma: float) -> float:
    bias = float(w @ rho)
    return bias * bias + sigma * sigma * float(w @ w)


def random_profile(rng: np.random.Generator, n: int, scale: float) -> np.ndarray:
    """Nonnegative profile with a random mix of exact zeros and positives."""
    rho = rng.uniform(0.0, scale, size=n)
    zero_frac = rng.uniform(0.0, 0.9)
    rho[rng.random(n) < zero_frac] = 0.0
    return rho


def window_minmax(img: GrayImage, search_radius: int, even_only: bool = False):
    """Per-pixel (min, max) of the mirrored search-window values."""
    pad = search_radius
    ypad = np.pad(img.values, pad, mode="reflect")
    h, w = img.values.shape
    lo = np.full((h, w), np.inf)
    hi = np.full((h, w), -np.inf)
    for di in range(-pad, pad + 1):
        for dj in range(-pad, pad + 1):
            if even_only and (di + dj) % 2 != 0:
                continue
            view = ypad[pad + di : pad + di + h, pad + dj : pad + dj + w]
            np.minimum(lo, view, out=lo)
            np.maximum(hi, view, out=hi)
    return lo, hi


def reference_owf(noisy: GrayImage, cfg: FilterConfig) -> np.ndarray:
    """Straight-line per-pixel optimal-weights filter: definition-first loops.

    Enumerates the search window per pixel, forms each dissimilarity by an
    explicit row-major accumulation over patch offsets through mirrored reads,
    solves the bandwidth with the scalar solver, and averages with
    sequentially normalized weights. No banding, no shifted views.
    """
    values = noisy.values
    h, w = values.shape
    r, s = cfg.patch_radius, cfg.search_radius
    mat, ksum = kernel_matrix(cfg.kernel, r)
    kflat = mat.ravel()
    nf = noise_floor(cfg.sigma)
    offsets = [(di, dj) for di in range(-s, s + 1) for dj in range(-s, s + 1)]

    def patch(i, j):
        rows = reflect_indices(np.arange(i - r, i + r + 1), h)
        cols = reflect_indices(np.arange(j - r, j + r + 1), w)
        return values[np.ix_(rows, cols)].ravel()

    out = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            base = patch(i, j)
            rho = np.empty(len(offsets))
            yvals = np.empty(len(offsets))
            for ti, (di, dj) in enumerate(offsets):
                cand = patch(i + di, j + dj)
                diff = cand - base
                acc = float(np.cumsum(kflat * (diff * diff))[-1])
                d = math.sqrt(acc / ksum)
                rho[ti] = max(d - nf, 0.0)
                yvals[ti] = mirror_read(noisy, PixelCoord(i + di, j + dj))
            weights = optimal_weights(DissimilarityProfile(rho), cfg.sigma).weights
            out[i, j] = float(np.cumsum(weights * yvals)[-1])
    return out
