"""Command-line interface: denoise, add-noise, psnr, and bench subcommands."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bench import (
    BenchConfig,
    default_configs,
    format_table,
    load_corpus,
    rows_to_csv,
    run_bench,
)
from .filters import FilterConfig, denoise
from .grid import PixelCoord
from .image_io import ImageIOError, read_image, write_image
from .metrics import compute_metrics
from .noise import NoiseSpec, add_noise
from .similarity import SimilarityKernel

_FILTER_NAMES = {"owf": "owf", "owf-split": "owf_split", "oracle": "oracle", "nlm": "nlm"}


def _odd_side(text: str) -> int:
    value = int(text)
    if value < 1 or value % 2 == 0:
        raise argparse.ArgumentTypeError(f"window side must be odd and >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _float_list(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    return [float(tok) for tok in text.split(",")]


def _side_list(text: str) -> list[int]:
    return [_odd_side(tok) for tok in text.split(",")] if text.strip() else []


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="owf", description="Optimal-weights grayscale denoising")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("denoise", help="denoise a grayscale image")
    d.add_argument("--input", required=True, help="noisy input image (.pgm/.png)")
    d.add_argument("--output", required=True, help="output image path (.pgm/.png)")
    d.add_argument("--sigma", type=_positive_float, required=True, help="noise standard deviation")
    d.add_argument("--filter", choices=sorted(_FILTER_NAMES), default="owf")
    d.add_argument("--kernel", choices=["rect", "gauss", "k0"], default="k0")
    d.add_argument("--patch", type=_odd_side, default=21, help="patch window side (odd)")
    d.add_argument("--search", type=_odd_side, default=13, help="search window side (odd)")
    d.add_argument("--clean", help="clean reference image (required for --filter oracle)")
    d.add_argument("--nlm-smoothing", type=_positive_float, default=None,
                   help="NLM smoothing parameter (default 0.55*sigma)")
    d.add_argument("--gauss-bandwidth", type=_positive_float, default=None,
                   help="gauss kernel bandwidth in pixel^2 (default patch_radius^2)")
    d.add_argument("--dump-weights", metavar="R,C",
                   help="print the weight map used at pixel (R,C) as JSON")
    d.add_argument("--dump-bandwidth", metavar="PATH",
                   help="save the per-pixel bandwidth grid as a .npy file")
    d.add_argument("--workers", type=int, default=1)

    n = sub.add_parser("add-noise", help="add seeded Gaussian noise to an image")
    n.add_argument("--input", required=True)
    n.add_argument("--output", required=True)
    n.add_argument("--sigma", type=_positive_float, required=True)
    n.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("psnr", help="PSNR of a candidate image against a reference")
    p.add_argument("candidate", help="image to score")
    p.add_argument("--reference", required=True, help="reference image")

    b = sub.add_parser("bench", help="PSNR benchmark over a directory of clean images")
    b.add_argument("--images", required=True, help="directory of clean .pgm/.png images")
    b.add_argument("--sigmas", type=_float_list, default=[10.0, 20.0, 30.0],
                   help="comma-separated noise levels (default 10,20,30)")
    b.add_argument("--out", help="write rows as CSV to this path")
    b.add_argument("--filters", default="oracle,owf,owf-split,nlm",
                   help="comma-separated subset of oracle,owf,owf-split,nlm")
    b.add_argument("--kernels", default="rect,gauss,k0",
                   help="comma-separated kernels for owf rows")
    b.add_argument("--patches", type=_side_list, default=[21],
                   help="comma-separated patch sides (full sweep: 11,13,15,17,19,21)")
    b.add_argument("--searches", type=_side_list, default=[13],
                   help="comma-separated search sides (full sweep: 11,13,15,17)")
    b.add_argument("--seed", type=int, default=0, help="base seed for noise realizations")
    b.add_argument("--workers", type=int, default=1)
    return parser


def _cmd_denoise(args) -> int:
    if args.filter == "oracle" and not args.clean:
        print("owf denoise: --filter oracle requires --clean", file=sys.stderr)
        return 2
    noisy = read_image(args.input)
    clean = read_image(args.clean) if args.clean else None
    if args.kernel == "gauss":
        kernel = SimilarityKernel.gauss(args.gauss_bandwidth)
    elif args.kernel == "k0":
        kernel = SimilarityKernel.k0()
    else:
        kernel = SimilarityKernel.rect()
    cfg = FilterConfig(
        sigma=args.sigma,
        patch_radius=args.patch // 2,
        search_radius=args.search // 2,
        kernel=kernel,
        variant=_FILTER_NAMES[args.filter],
        nlm_smoothing=args.nlm_smoothing,
    )
    dump_at = None
    if args.dump_weights:
        try:
            row_s, col_s = args.dump_weights.split(",")
            dump_at = PixelCoord(int(row_s), int(col_s))
        except ValueError:
            print(f"owf denoise: --dump-weights expects R,C, got {args.dump_weights!r}",
                  file=sys.stderr)
            return 2
    result = denoise(
        noisy,
        cfg,
        clean=clean,
        workers=args.workers,
        collect_bandwidth=bool(args.dump_bandwidth),
        dump_weights_at=dump_at,
    )
    write_image(result.output, args.output)
    if args.dump_bandwidth:
        np.save(args.dump_bandwidth, result.per_pixel_bandwidth)
    if dump_at is not None:
        print(_weight_dump_json(result, cfg, dump_at))
    return 0


def _weight_dump_json(result, cfg: FilterConfig, at: PixelCoord) -> str:
    from .filters import _search_offsets  # same enumeration the filter used

    offsets = _search_offsets(cfg.search_radius, even_only=cfg.variant == "owf_split")
    side = 2 * cfg.search_radius + 1
    grid = [[0.0] * side for _ in range(side)]
    for (di, dj), w in zip(offsets, result.weight_map_dump.weights):
        grid[di + cfg.search_radius][dj + cfg.search_radius] = float(w)
    bandwidth = None
    if result.per_pixel_bandwidth is not None:
        value = float(result.per_pixel_bandwidth[at.row, at.col])
        bandwidth = value if math.isfinite(value) else "inf"
    return json.dumps(
        {"row": at.row, "col": at.col, "variant": cfg.variant, "bandwidth": bandwidth,
         "weights": grid}
    )


def _cmd_add_noise(args) -> int:
    clean = read_image(args.input)
    noisy = add_noise(clean, NoiseSpec(sigma=args.sigma, seed=args.seed))
    write_image(noisy, args.output)
    return 0


def _cmd_psnr(args) -> int:
    reference = read_image(args.reference)
    candidate = read_image(args.candidate)
    report = compute_metrics(reference, candidate)
    print("inf" if math.isinf(report.psnr_db) else f"{report.psnr_db:.4f}")
    return 0


def _cmd_bench(args) -> int:
    corpus = load_corpus(args.images)
    if not corpus:
        print(f"owf bench: no readable images in {args.images}", file=sys.stderr)
        return 1
    filters = [f.strip() for f in args.filters.split(",") if f.strip()]
    kernels = [k.strip() for k in args.kernels.split(",") if k.strip()]
    configs = [
        bc
        for bc in default_configs(args.patches, args.searches)
        if bc.filter in filters and (bc.filter != "owf" or bc.kernel in kernels)
    ]
    rows = run_bench(corpus, args.sigmas, configs, base_seed=args.seed, workers=args.workers)
    if rows:
        sys.stdout.write(format_table(rows))
    if args.out:
        Path(args.out).write_text(rows_to_csv(rows))
    return 0


def cli_main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "denoise": _cmd_denoise,
        "add-noise": _cmd_add_noise,
        "psnr": _cmd_psnr,
        "bench": _cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except FileNotFoundError as exc:
        print(f"owf {args.command}: file not found: {exc.filename or exc}", file=sys.stderr)
        return 1
    except (ImageIOError, ValueError) as exc:
        print(f"owf {args.command}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
