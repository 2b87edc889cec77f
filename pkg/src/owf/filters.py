"""Per-pixel weighted-average filters: optimal-weights, oracle, split, NLM.

Every variant estimates a pixel as a convex combination of the noisy values
in its search window. They differ only in how the weights are chosen:

* owf        -- dissimilarities from noisy patches, weights from the
                closed-form simplex solver (triangular in dissimilarity).
* oracle     -- dissimilarities |f(x) - f(x0)| from a clean reference image;
                an upper-bound benchmark, not computable in practice.
* owf_split  -- checkerboard split: odd-parity patch pixels measure the
                dissimilarity, even-parity window pixels are averaged.
* nlm        -- classic exponential patch-similarity weights (baseline).

The engine processes fixed-height row bands with per-offset shifted views of
the mirror-padded image. All per-pixel reductions accumulate sequentially in
window enumeration order, so results are bit-identical for any band split or
worker count, and identical to a straight-line per-pixel evaluation.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import GrayImage, PixelCoord, mirror_pad, reflect_indices
from .similarity import (
    SimilarityKernel,
    dissimilarity,
    kernel_matrix,
    noise_floor,
    patch_distance_squared,
    split_dissimilarity,
    split_parity_mask,
)
from .solver import DissimilarityProfile, WeightMap, _scan_bandwidth, solve_bandwidth

__all__ = [
    "FilterConfig",
    "DenoiseResult",
    "denoise",
    "owf_denoise",
    "owf_split_denoise",
    "oracle_filter",
    "nlm_denoise",
    "nlm_sweep",
    "export_weight_map",
]

_VARIANTS = ("owf", "owf_split", "oracle", "nlm")
NLM_SMOOTHING_DEFAULT = 0.55  # fraction of sigma when nlm_smoothing is unset

# Band height is chosen from the image width and window size only, never from
# the worker count, so the band split (and hence the output bytes) is fixed.
_BAND_ELEMENT_BUDGET = 3_000_000


@dataclass(frozen=True)
class FilterConfig:
    """Parameters shared by all filter variants.

    Radii are in pixels: a patch window has side 2*patch_radius+1 and a search
    window side 2*search_radius+1. sigma is the noise standard deviation in
    intensity units and is assumed known. nlm_smoothing defaults to
    0.55*sigma when unset.
    """

    sigma: float
    patch_radius: int = 10
    search_radius: int = 6
    kernel: SimilarityKernel = SimilarityKernel.rect()
    variant: str = "owf"
    nlm_smoothing: float | None = None

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError("sigma must be > 0")
        if self.patch_radius < 0:
            raise ValueError("patch_radius must be >= 0")
        if self.search_radius < 1:
            raise ValueError("search_radius must be >= 1")
        if self.variant not in _VARIANTS:
            raise ValueError(f"variant must be one of {_VARIANTS}, got {self.variant!r}")
        if self.nlm_smoothing is not None and self.nlm_smoothing <= 0.0:
            raise ValueError("nlm_smoothing must be > 0")

    @property
    def smoothing(self) -> float:
        return self.nlm_smoothing if self.nlm_smoothing is not None else NLM_SMOOTHING_DEFAULT * self.sigma


@dataclass(frozen=True)
class DenoiseResult:
    """Filter output plus optional diagnostics.

    per_pixel_bandwidth holds the solved bandwidth at every pixel (+inf where
    the profile was degenerate); None unless requested or for NLM, which has
    no bandwidth. weight_map_dump holds the weight map at the requested pixel.
    """

    output: GrayImage
    per_pixel_bandwidth: np.ndarray | None = None
    weight_map_dump: WeightMap | None = None


def _search_offsets(search_radius: int, even_only: bool = False) -> list[tuple[int, int]]:
    s = search_radius
    offsets = [(di, dj) for di in range(-s, s + 1) for dj in range(-s, s + 1)]
    if even_only:
        offsets = [t for t in offsets if (t[0] + t[1]) % 2 == 0]
    return offsets


def _patch_entries(cfg: FilterConfig) -> tuple[list[tuple[int, int, float]], float]:
    """Row-major (zi, zj, weight) triples of the patch kernel and their sum.

    The split variant keeps only odd-parity offsets with unit weight; skipping
    the zero-weight entries leaves the ordered per-pixel sums unchanged.
    """
    r = cfg.patch_radius
    if cfg.variant == "owf_split":
        mask = split_parity_mask(r)
        entries = [
            (zi, zj, 1.0)
            for zi in range(2 * r + 1)
            for zj in range(2 * r + 1)
            if mask[zi, zj]
        ]
        return entries, float(mask.sum())
    mat, ksum = kernel_matrix(cfg.kernel, r)
    entries = [
        (zi, zj, float(mat[zi, zj])) for zi in range(2 * r + 1) for zj in range(2 * r + 1)
    ]
    return entries, ksum


def _band_edges(height: int, width: int, n_offsets: int) -> list[tuple[int, int]]:
    rows = max(8, _BAND_ELEMENT_BUDGET // max(1, width * n_offsets))
    return [(r0, min(r0 + rows, height)) for r0 in range(0, height, rows)]


def _run_bands(bands, fn, workers: int) -> None:
    if workers <= 1 or len(bands) == 1:
        for band in bands:
            fn(band)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for _ in pool.map(fn, bands):
            pass


def _pad_width(cfg: FilterConfig) -> int:
    if cfg.variant == "oracle":
        return cfg.search_radius
    return cfg.search_radius + cfg.patch_radius


def _profile_band(
    ypad: np.ndarray,
    refpad: np.ndarray,
    cfg: FilterConfig,
    offsets: list[tuple[int, int]],
    entries: list[tuple[int, int, float]],
    ksum: float,
    pad: int,
    band: tuple[int, int],
    width: int,
    squared: bool,
) -> np.ndarray:
    """Per-offset dissimilarity stack for one row band.

    For patch variants each slot accumulates kernel-weighted squared patch
    differences in row-major patch order, then becomes the RMS distance minus
    the noise floor (or the squared distance when `squared`, for NLM). For the
    oracle it is simply |ref(x+t) - ref(x)|.
    """
    row0, row1 = band
    bh = row1 - row0
    r = cfg.patch_radius
    nf = noise_floor(cfg.sigma)
    stack = np.empty((len(offsets), bh, width))

    if cfg.variant == "oracle":
        base = refpad[pad + row0 : pad + row1, pad : pad + width]
        for ti, (di, dj) in enumerate(offsets):
            sh = refpad[pad + row0 + di : pad + row1 + di, pad + dj : pad + dj + width]
            np.subtract(sh, base, out=stack[ti])
            np.abs(stack[ti], out=stack[ti])
        return stack

    b0 = pad + row0 - r
    base = ypad[b0 : b0 + bh + 2 * r, pad - r : pad - r + width + 2 * r]
    tmp = np.empty((bh, width))
    for ti, (di, dj) in enumerate(offsets):
        sh = ypad[b0 + di : b0 + di + bh + 2 * r, pad - r + dj : pad - r + dj + width + 2 * r]
        sq = sh - base
        sq *= sq
        acc = stack[ti]
        acc.fill(0.0)
        for zi, zj, kw in entries:
            view = sq[zi : zi + bh, zj : zj + width]
            if kw == 1.0:
                np.add(acc, view, out=acc)
            else:
                np.multiply(view, kw, out=tmp)
                np.add(acc, tmp, out=acc)
        np.divide(acc, ksum, out=acc)
        if not squared:
            np.sqrt(acc, out=acc)
            np.subtract(acc, nf, out=acc)
            np.maximum(acc, 0.0, out=acc)
    return stack


def _weights_from_profiles(stack: np.ndarray, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Turn a dissimilarity stack into unnormalized weights (in place).

    Returns the reported bandwidth grid (+inf where degenerate). Degenerate
    pixels (all-zero profiles) use bandwidth 1.0 internally, which makes every
    weight exactly 1 and the average uniform.
    """
    srt = np.sort(stack, axis=0, kind="stable")
    degenerate = srt[-1] == 0.0
    a, _ = _scan_bandwidth(srt, sigma)
    a_used = np.where(degenerate, 1.0, a)
    a_reported = np.where(degenerate, np.inf, a)
    np.subtract(a_used[None], stack, out=stack)
    np.maximum(stack, 0.0, out=stack)
    return stack, a_reported


def _average_band(
    wstack: np.ndarray,
    ypad: np.ndarray,
    offsets: list[tuple[int, int]],
    pad: int,
    band: tuple[int, int],
    width: int,
    out: np.ndarray,
) -> None:
    """out[band] = sum_t (w_t / sum w) * Y_t, accumulated in window order."""
    row0, row1 = band
    den = wstack[0].copy()
    for ti in range(1, len(offsets)):
        den += wstack[ti]
    acc = np.zeros((row1 - row0, width))
    tmp = np.empty_like(acc)
    for ti, (di, dj) in enumerate(offsets):
        yv = ypad[pad + row0 + di : pad + row1 + di, pad + dj : pad + dj + width]
        np.divide(wstack[ti], den, out=tmp)
        np.multiply(tmp, yv, out=tmp)
        np.add(acc, tmp, out=acc)
    out[row0:row1] = acc


def _weights_variant_arrays(
    noisy: GrayImage,
    cfg: FilterConfig,
    clean: GrayImage | None,
    workers: int,
    collect_bandwidth: bool,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Engine for the owf / owf_split / oracle variants."""
    height, width = noisy.height, noisy.width
    pad = _pad_width(cfg)
    ypad = mirror_pad(noisy, pad)
    refpad = mirror_pad(clean, pad) if cfg.variant == "oracle" else ypad
    offsets = _search_offsets(cfg.search_radius, even_only=cfg.variant == "owf_split")
    entries, ksum = ([], 1.0) if cfg.variant == "oracle" else _patch_entries(cfg)

    out = np.empty((height, width))
    bw = np.empty((height, width)) if collect_bandwidth else None

    def run(band):
        stack = _profile_band(
            ypad, refpad, cfg, offsets, entries, ksum, pad, band, width, squared=False
        )
        wstack, a_reported = _weights_from_profiles(stack, cfg.sigma)
        _average_band(wstack, ypad, offsets, pad, band, width, out)
        if bw is not None:
            bw[band[0] : band[1]] = a_reported

    _run_bands(_band_edges(height, width, len(offsets)), run, workers)
    return out, bw


def _nlm_arrays(
    noisy: GrayImage, cfg: FilterConfig, smoothings: list[float], workers: int
) -> list[np.ndarray]:
    """NLM engine; evaluates several smoothing parameters over one distance pass."""
    height, width = noisy.height, noisy.width
    pad = _pad_width(cfg)
    ypad = mirror_pad(noisy, pad)
    offsets = _search_offsets(cfg.search_radius)
    kernel = cfg.kernel if cfg.kernel.kind == "gauss" else SimilarityKernel.gauss()
    nlm_cfg = FilterConfig(
        sigma=cfg.sigma,
        patch_radius=cfg.patch_radius,
        search_radius=cfg.search_radius,
        kernel=kernel,
        variant="nlm",
    )
    entries, ksum = _patch_entries(nlm_cfg)
    outs = [np.empty((height, width)) for _ in smoothings]

    def run(band):
        d2 = _profile_band(
            ypad, ypad, nlm_cfg, offsets, entries, ksum, pad, band, width, squared=True
        )
        wstack = np.empty_like(d2)
        for oi, smoothing in enumerate(smoothings):
            h2 = smoothing * smoothing
            np.divide(d2, h2, out=wstack)
            np.negative(wstack, out=wstack)
            np.exp(wstack, out=wstack)
            _average_band(wstack, ypad, offsets, pad, band, width, outs[oi])

    _run_bands(_band_edges(height, width, len(offsets)), run, workers)
    return outs


def _validate_geometry(img: GrayImage, cfg: FilterConfig) -> None:
    pad = _pad_width(cfg)
    if pad >= min(img.height, img.width):
        raise ValueError(
            f"windows too large: search+patch radius {pad} must be below "
            f"min(width, height) = {min(img.height, img.width)}"
        )


def owf_denoise(
    noisy: GrayImage,
    cfg: FilterConfig,
    *,
    workers: int = 1,
    collect_bandwidth: bool = False,
) -> DenoiseResult:
    """Optimal-weights filter: per-pixel bandwidth solve on noisy-patch
    dissimilarities, triangular weights, weighted average."""
    cfg = _with_variant(cfg, "owf")
    _validate_geometry(noisy, cfg)
    out, bw = _weights_variant_arrays(noisy, cfg, None, workers, collect_bandwidth)
    return DenoiseResult(GrayImage(out), per_pixel_bandwidth=bw)


def owf_split_denoise(
    noisy: GrayImage,
    cfg: FilterConfig,
    *,
    workers: int = 1,
    collect_bandwidth: bool = False,
) -> DenoiseResult:
    """Split-pixel variant: dissimilarities from odd-parity patch offsets,
    averaging over the even-parity half of the search window."""
    cfg = _with_variant(cfg, "owf_split")
    if cfg.patch_radius < 1:
        raise ValueError("owf_split needs patch_radius >= 1")
    _validate_geometry(noisy, cfg)
    out, bw = _weights_variant_arrays(noisy, cfg, None, workers, collect_bandwidth)
    return DenoiseResult(GrayImage(out), per_pixel_bandwidth=bw)


def oracle_filter(
    noisy: GrayImage,
    clean: GrayImage,
    cfg: FilterConfig,
    *,
    workers: int = 1,
    collect_bandwidth: bool = False,
) -> DenoiseResult:
    """Oracle benchmark: weights from the clean image's brightness variation,
    averaging the noisy values."""
    if clean.height != noisy.height or clean.width != noisy.width:
        raise ValueError("clean and noisy images must have identical dimensions")
    cfg = _with_variant(cfg, "oracle")
    _validate_geometry(noisy, cfg)
    out, bw = _weights_variant_arrays(noisy, cfg, clean, workers, collect_bandwidth)
    return DenoiseResult(GrayImage(out), per_pixel_bandwidth=bw)


def nlm_denoise(noisy: GrayImage, cfg: FilterConfig, *, workers: int = 1) -> DenoiseResult:
    """Non-local means baseline: weights exp(-d_K^2 / smoothing^2)."""
    cfg = _with_variant(cfg, "nlm")
    _validate_geometry(noisy, cfg)
    out = _nlm_arrays(noisy, cfg, [cfg.smoothing], workers)[0]
    return DenoiseResult(GrayImage(out))


def nlm_sweep(
    noisy: GrayImage, cfg: FilterConfig, smoothings: list[float], *, workers: int = 1
) -> list[GrayImage]:
    """NLM outputs for several smoothing parameters, sharing the distance pass."""
    cfg = _with_variant(cfg, "nlm")
    _validate_geometry(noisy, cfg)
    if not smoothings:
        return []
    if any(s <= 0.0 for s in smoothings):
        raise ValueError("smoothing parameters must be > 0")
    return [GrayImage(a) for a in _nlm_arrays(noisy, cfg, list(smoothings), workers)]


def denoise(
    noisy: GrayImage,
    cfg: FilterConfig,
    *,
    clean: GrayImage | None = None,
    workers: int = 1,
    collect_bandwidth: bool = False,
    dump_weights_at: PixelCoord | None = None,
) -> DenoiseResult:
    """Run the variant selected by cfg.variant."""
    if cfg.variant == "oracle":
        if clean is None:
            raise ValueError("oracle variant requires a clean reference image")
        result = oracle_filter(
            noisy, clean, cfg, workers=workers, collect_bandwidth=collect_bandwidth
        )
    elif cfg.variant == "owf":
        result = owf_denoise(noisy, cfg, workers=workers, collect_bandwidth=collect_bandwidth)
    elif cfg.variant == "owf_split":
        result = owf_split_denoise(
            noisy, cfg, workers=workers, collect_bandwidth=collect_bandwidth
        )
    else:
        result = nlm_denoise(noisy, cfg, workers=workers)
    if dump_weights_at is not None:
        wmap, _ = export_weight_map(noisy, cfg, dump_weights_at, clean=clean)
        result = DenoiseResult(result.output, result.per_pixel_bandwidth, wmap)
    return result


def _with_variant(cfg: FilterConfig, variant: str) -> FilterConfig:
    if cfg.variant == variant:
        return cfg
    return FilterConfig(
        sigma=cfg.sigma,
        patch_radius=cfg.patch_radius,
        search_radius=cfg.search_radius,
        kernel=cfg.kernel,
        variant=variant,
        nlm_smoothing=cfg.nlm_smoothing,
    )


def _mirrored_value(img: GrayImage, row: int, col: int) -> float:
    rows = reflect_indices(np.asarray([row]), img.height)
    cols = reflect_indices(np.asarray([col]), img.width)
    return float(img.values[rows[0], cols[0]])


def export_weight_map(
    noisy: GrayImage,
    cfg: FilterConfig,
    x0: PixelCoord,
    *,
    clean: GrayImage | None = None,
) -> tuple[WeightMap, float | None]:
    """The exact weights and bandwidth the configured filter uses at x0.

    Computed by the straight-line per-pixel path, which matches the banded
    engine bit for bit. For the split variant the weights cover the
    even-parity window subset in row-major order; for NLM the bandwidth is
    None. The weight at x0 dotted with the window's noisy values reproduces
    the output pixel exactly.
    """
    if not (0 <= x0.row < noisy.height and 0 <= x0.col < noisy.width):
        raise ValueError(f"pixel {x0} outside {noisy.width}x{noisy.height} image")
    _validate_geometry(noisy, cfg)
    offsets = _search_offsets(cfg.search_radius, even_only=cfg.variant == "owf_split")

    if cfg.variant == "nlm":
        kernel = cfg.kernel if cfg.kernel.kind == "gauss" else SimilarityKernel.gauss()
        h2 = cfg.smoothing * cfg.smoothing
        d2 = np.empty(len(offsets))
        for ti, (di, dj) in enumerate(offsets):
            d2[ti] = patch_distance_squared(
                noisy, PixelCoord(x0.row + di, x0.col + dj), x0, cfg.patch_radius, kernel
            )
        # np.exp (not math.exp): numpy's vectorized exp is what the engine
        # applies, and the two differ in the last ulp
        w = np.exp(np.negative(d2 / h2))
        total = float(np.cumsum(w)[-1])
        return WeightMap(w / total), None

    rho = np.empty(len(offsets))
    if cfg.variant == "oracle":
        if clean is None:
            raise ValueError("oracle variant requires a clean reference image")
        center = _mirrored_value(clean, x0.row, x0.col)
        for ti, (di, dj) in enumerate(offsets):
            rho[ti] = abs(_mirrored_value(clean, x0.row + di, x0.col + dj) - center)
    elif cfg.variant == "owf_split":
        for ti, (di, dj) in enumerate(offsets):
            rho[ti] = split_dissimilarity(
                noisy, PixelCoord(x0.row + di, x0.col + dj), x0, cfg.patch_radius, cfg.sigma
            )
    else:
        for ti, (di, dj) in enumerate(offsets):
            rho[ti] = dissimilarity(
                noisy,
                PixelCoord(x0.row + di, x0.col + dj),
                x0,
                cfg.patch_radius,
                cfg.kernel,
                cfg.sigma,
            )

    profile = DissimilarityProfile(rho, center_index=offsets.index((0, 0)))
    sol = solve_bandwidth(profile, cfg.sigma)
    a = 1.0 if sol.degenerate else sol.bandwidth
    w = np.maximum(a - rho, 0.0)
    total = float(np.cumsum(w)[-1])
    return WeightMap(w / total), sol.bandwidth
