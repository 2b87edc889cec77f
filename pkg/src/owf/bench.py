"""PSNR benchmark harness: seeded noise, every filter variant, CSV/table output."""

from __future__ import annotations

import sys
import time
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .filters import (
    FilterConfig,
    nlm_sweep,
    oracle_filter,
    owf_denoise,
    owf_split_denoise,
)
from .grid import GrayImage
from .image_io import ImageIOError, read_image
from .metrics import psnr_db
from .noise import NoiseSpec, add_noise
from .similarity import SimilarityKernel

__all__ = [
    "BenchRow",
    "BenchConfig",
    "NLM_SMOOTHING_FRACTIONS",
    "default_configs",
    "load_corpus",
    "derive_seed",
    "run_bench",
    "rows_to_csv",
    "format_table",
]

CSV_COLUMNS = ("image", "sigma", "filter", "kernel", "patch", "search", "psnr_db", "seconds")

# NLM rows report the best PSNR over this smoothing grid (fractions of sigma).
NLM_SMOOTHING_FRACTIONS = tuple(round(0.30 + 0.05 * k, 2) for k in range(25))

# Window sides the tables sweep; the default run uses only the starred pair.
PATCH_SIDES = (11, 13, 15, 17, 19, 21)
SEARCH_SIDES = (11, 13, 15, 17)
DEFAULT_PATCH_SIDE = 21
DEFAULT_SEARCH_SIDE = 13


@dataclass(frozen=True)
class BenchRow:
    image: str
    sigma: float
    filter: str
    kernel: str
    patch: int
    search: int
    psnr_db: float
    seconds: float

    def sort_key(self):
        return (self.image, self.sigma, self.filter, self.kernel, self.patch, self.search)


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark recipe: a filter variant with its kernel and window sides."""

    filter: str  # owf | owf-split | oracle | nlm
    kernel: str  # rect | gauss | k0 | "-" (oracle has no patch kernel)
    patch_side: int = DEFAULT_PATCH_SIDE
    search_side: int = DEFAULT_SEARCH_SIDE


def default_configs(
    patch_sides=(DEFAULT_PATCH_SIDE,), search_sides=(DEFAULT_SEARCH_SIDE,)
) -> list[BenchConfig]:
    """One row per variant/kernel for every requested window-size pair."""
    configs = []
    for m in patch_sides:
        for big_m in search_sides:
            configs.append(BenchConfig("oracle", "-", m, big_m))
            for kernel in ("rect", "gauss", "k0"):
                configs.append(BenchConfig("owf", kernel, m, big_m))
            configs.append(BenchConfig("owf-split", "rect", m, big_m))
            configs.append(BenchConfig("nlm", "gauss", m, big_m))
    return configs


def load_corpus(directory) -> list[tuple[str, GrayImage]]:
    """All readable .pgm/.png files in a directory, sorted by stem.

    Unreadable entries are reported on stderr and skipped.
    """
    directory = Path(directory)
    corpus = []
    for path in sorted(directory.iterdir()):
        if path.suffix.lower() not in (".pgm", ".png"):
            continue
        try:
            corpus.append((path.stem, read_image(path)))
        except (ImageIOError, OSError) as exc:
            print(f"bench: skipping {path}: {exc}", file=sys.stderr)
    return corpus


def derive_seed(base_seed: int, image_name: str, sigma: float) -> int:
    """Stable per-(image, sigma) seed so every config sees the same noise."""
    tag = f"{image_name}|{sigma:g}".encode()
    return (base_seed * 0x9E3779B97F4A7C15 + zlib.crc32(tag)) % 2**64


def _clamped(img: GrayImage) -> GrayImage:
    # PSNR is measured on the [0,255]-clamped real-valued output, before any
    # 8-bit rounding.
    return GrayImage(np.clip(img.values, 0.0, 255.0))


def _kernel_from_name(name: str) -> SimilarityKernel:
    if name in ("rect", "-"):
        return SimilarityKernel.rect()
    if name == "gauss":
        return SimilarityKernel.gauss()
    if name == "k0":
        return SimilarityKernel.k0()
    raise ValueError(f"unknown kernel {name!r}")


def _run_one(
    clean: GrayImage, noisy: GrayImage, sigma: float, bc: BenchConfig, workers: int
) -> tuple[float, float]:
    cfg = FilterConfig(
        sigma=sigma,
        patch_radius=bc.patch_side // 2,
        search_radius=bc.search_side // 2,
        kernel=_kernel_from_name(bc.kernel),
    )
    start = time.perf_counter()
    if bc.filter == "oracle":
        out = oracle_filter(noisy, clean, cfg, workers=workers).output
        psnr = psnr_db(clean, _clamped(out))
    elif bc.filter == "owf":
        out = owf_denoise(noisy, cfg, workers=workers).output
        psnr = psnr_db(clean, _clamped(out))
    elif bc.filter == "owf-split":
        out = owf_split_denoise(noisy, cfg, workers=workers).output
        psnr = psnr_db(clean, _clamped(out))
    elif bc.filter == "nlm":
        smoothings = [f * sigma for f in NLM_SMOOTHING_FRACTIONS]
        outs = nlm_sweep(noisy, cfg, smoothings, workers=workers)
        psnr = max(psnr_db(clean, _clamped(o)) for o in outs)
    else:
        raise ValueError(f"unknown filter {bc.filter!r}")
    return psnr, time.perf_counter() - start


def run_bench(
    corpus: list[tuple[str, GrayImage]],
    sigmas: list[float],
    configs: list[BenchConfig],
    base_seed: int = 0,
    workers: int = 1,
) -> list[BenchRow]:
    """One row per (image, sigma, config); rows come back in canonical order."""
    rows = []
    for name, clean in corpus:
        for sigma in sigmas:
            noisy = add_noise(clean, NoiseSpec(sigma, derive_seed(base_seed, name, sigma)))
            for bc in configs:
                psnr, seconds = _run_one(clean, noisy, sigma, bc, workers)
                rows.append(
                    BenchRow(
                        name, sigma, bc.filter, bc.kernel, bc.patch_side, bc.search_side, psnr, seconds
                    )
                )
    return sorted(rows, key=BenchRow.sort_key)


def rows_to_csv(rows: list[BenchRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(
            f"{r.image},{r.sigma:g},{r.filter},{r.kernel},{r.patch},{r.search},"
            f"{r.psnr_db:.4f},{r.seconds:.3f}"
        )
    return "\n".join(lines) + "\n"


def format_table(rows: list[BenchRow]) -> str:
    header = ["image", "sigma", "filter", "kernel", "m", "M", "PSNR (dB)", "sec"]
    cells = [
        [r.image, f"{r.sigma:g}", r.filter, r.kernel, f"{r.patch}x{r.patch}",
         f"{r.search}x{r.search}", f"{r.psnr_db:.2f}", f"{r.seconds:.1f}"]
        for r in rows
    ]
    widths = [max(len(h), *(len(c[i]) for c in cells)) if cells else len(h) for i, h in enumerate(header)]
    def fmt(row):
        return "  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip()
    lines = [fmt(header), fmt(["-" * w for w in widths])]
    lines.extend(fmt(c) for c in cells)
    return "\n".join(lines) + "\n"
