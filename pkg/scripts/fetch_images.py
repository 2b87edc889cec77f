#!/usr/bin/env python3
"""Fetch the standard denoising test images and store them as 8-bit PGM.

The benchmark tables and part of the acceptance suite compare against the
classic test set (Lena, Barbara, Boat at 512x512; House, Peppers at 256x256).
Those images are not vendored; this script downloads them from well-known
mirrors into ./images/ (or the directory named by --dest / $OWF_IMAGES).

Usage:
    python scripts/fetch_images.py [--dest images]

Each image is tried against several mirrors; the first response that decodes
to a grayscale-convertible image with the expected dimensions wins. Verify
provenance yourself if exact table reproduction matters: the expected set is
the one at http://decsai.ugr.es/~javier/denoise/test_images/.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
import urllib.request
from pathlib import Path

from PIL import Image

EXPECTED = {
    "lena": (512, 512),
    "barbara": (512, 512),
    "boat": (512, 512),
    "house": (256, 256),
    "peppers": (256, 256),
}

MIRRORS = {
    "lena": [
        "https://decsai.ugr.es/~javier/denoise/test_images/lena.png",
        "http://decsai.ugr.es/~javier/denoise/test_images/lena.png",
        "https://webpages.tuni.fi/foi/GCF-BM3D/images/image_Lena512.png",
        "https://www.cs.tut.fi/~foi/GCF-BM3D/images/image_Lena512.png",
    ],
    "barbara": [
        "https://decsai.ugr.es/~javier/denoise/test_images/barbara.png",
        "http://decsai.ugr.es/~javier/denoise/test_images/barbara.png",
        "https://webpages.tuni.fi/foi/GCF-BM3D/images/image_Barbara512.png",
        "https://www.cs.tut.fi/~foi/GCF-BM3D/images/image_Barbara512.png",
    ],
    "boat": [
        "https://decsai.ugr.es/~javier/denoise/test_images/boat.png",
        "http://decsai.ugr.es/~javier/denoise/test_images/boat.png",
        "https://webpages.tuni.fi/foi/GCF-BM3D/images/image_Boats512.png",
        "https://www.cs.tut.fi/~foi/GCF-BM3D/images/image_Boats512.png",
    ],
    "house": [
        "https://decsai.ugr.es/~javier/denoise/test_images/house.png",
        "http://decsai.ugr.es/~javier/denoise/test_images/house.png",
        "https://webpages.tuni.fi/foi/GCF-BM3D/images/image_House256.png",
        "https://www.cs.tut.fi/~foi/GCF-BM3D/images/image_House256.png",
    ],
    "peppers": [
        "https://decsai.ugr.es/~javier/denoise/test_images/peppers256.png",
        "http://decsai.ugr.es/~javier/denoise/test_images/peppers256.png",
        "https://webpages.tuni.fi/foi/GCF-BM3D/images/image_Peppers256.png",
        "https://www.cs.tut.fi/~foi/GCF-BM3D/images/image_Peppers256.png",
    ],
}


def fetch_one(name: str, dest: Path) -> bool:
    target = dest / f"{name}.pgm"
    if target.exists():
        print(f"{name}: already present at {target}")
        return True
    expected = EXPECTED[name]
    for url in MIRRORS[name]:
        try:
            with urllib.request.urlopen(url, timeout=30) as resp:
                payload = resp.read()
            img = Image.open(io.BytesIO(payload)).convert("L")
        except Exception as exc:  # noqa: BLE001 - report and try the next mirror
            print(f"{name}: {url} failed ({exc})", file=sys.stderr)
            continue
        if img.size != expected:
            print(f"{name}: {url} has size {img.size}, expected {expected}", file=sys.stderr)
            continue
        width, height = img.size
        header = f"P5\n{width} {height}\n255\n".encode("ascii")
        target.write_bytes(header + img.tobytes())
        print(f"{name}: saved {target} from {url}")
        return True
    print(f"{name}: all mirrors failed", file=sys.stderr)
    return False


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--dest",
        default=os.environ.get("OWF_IMAGES", "images"),
        help="destination directory (default: $OWF_IMAGES or ./images)",
    )
    args = parser.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    ok = all([fetch_one(name, dest) for name in EXPECTED])
    if not ok:
        print(
            "some images could not be fetched; the PSNR-table tests will be "
            "skipped until they are available",
            file=sys.stderr,
        )
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
