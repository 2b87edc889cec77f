"""Grayscale image files: binary PGM (P5, maxval 255) and 8-bit PNG.

Intensities live as float64 in memory; writing clamps to [0, 255] and rounds
half away from zero, so an integral in-range image round-trips losslessly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .grid import GrayImage

__all__ = [
    "ImageIOError",
    "MalformedHeaderError",
    "UnsupportedFormatError",
    "read_image",
    "write_image",
]


class ImageIOError(Exception):
    """Base class for image file errors."""


class MalformedHeaderError(ImageIOError):
    """The file does not parse as the format its magic bytes claim."""


class UnsupportedFormatError(ImageIOError):
    """Recognized file, but not 8-bit grayscale PGM/PNG."""


def _pgm_tokens(data: bytes):
    """PGM header tokens: whitespace-separated, '#' comments run to end of line."""
    i = 0
    n = len(data)
    while i < n:
        c = data[i : i + 1]
        if c in b" \t\r\n":
            i += 1
        elif c == b"#":
            while i < n and data[i : i + 1] not in b"\r\n":
                i += 1
        else:
            j = i
            while j < n and data[j : j + 1] not in b" \t\r\n":
                j += 1
            yield data[i:j], j
            i = j


def _read_pgm(data: bytes, path: Path) -> GrayImage:
    tokens = _pgm_tokens(data)
    try:
        (magic, _), (w_tok, _), (h_tok, _), (maxval_tok, end) = (
            next(tokens),
            next(tokens),
            next(tokens),
            next(tokens),
        )
    except StopIteration:
        raise MalformedHeaderError(f"{path}: truncated PGM header") from None
    if magic != b"P5":
        raise MalformedHeaderError(f"{path}: not a binary PGM (magic {magic!r})")
    try:
        width, height, maxval = int(w_tok), int(h_tok), int(maxval_tok)
    except ValueError:
        raise MalformedHeaderError(f"{path}: non-numeric PGM header fields") from None
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"{path}: bad PGM dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormatError(f"{path}: only maxval 255 supported, got {maxval}")
    raster = data[end + 1 : end + 1 + width * height]  # single whitespace after maxval
    if len(raster) != width * height:
        raise MalformedHeaderError(f"{path}: PGM raster shorter than {width}x{height}")
    values = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayImage(values.astype(np.float64))


def _read_png(path: Path) -> GrayImage:
    try:
        with Image.open(path) as im:
            if im.mode != "L":
                raise UnsupportedFormatError(
                    f"{path}: only 8-bit grayscale PNG supported, got mode {im.mode!r}"
                )
            values = np.asarray(im, dtype=np.float64)
    except UnsupportedFormatError:
        raise
    except Exception as exc:
        raise MalformedHeaderError(f"{path}: unreadable PNG ({exc})") from exc
    return GrayImage(values)


def read_image(path) -> GrayImage:
    """Load a PGM (P5) or grayscale PNG file; missing files raise FileNotFoundError."""
    path = Path(path)
    data = path.read_bytes()
    if data[:2] == b"P5":
        return _read_pgm(data, path)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _read_png(path)
    raise UnsupportedFormatError(f"{path}: unrecognized image format")


def quantize(img: GrayImage) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero to uint8."""
    clamped = np.clip(img.values, 0.0, 255.0)
    return np.floor(clamped + 0.5).astype(np.uint8)


def write_image(img: GrayImage, path) -> None:
    """Write as binary PGM (suffix .pgm) or 8-bit PNG (suffix .png)."""
    path = Path(path)
    pixels = quantize(img)
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
        path.write_bytes(header + pixels.tobytes())
    elif suffix == ".png":
        Image.fromarray(pixels, mode="L").save(path)
    else:
        raise UnsupportedFormatError(f"{path}: unsupported output suffix {suffix!r}")
