"""Grayscale image container and square-window geometry with mirrored borders."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class PixelCoord(NamedTuple):
    """Integer grid coordinate; may lie outside the image before mirroring."""

    row: int
    col: int


@dataclass(frozen=True)
class WindowSpec:
    """Square window of side 2*radius+1 centered at a pixel."""

    center: PixelCoord
    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"window radius must be >= 0, got {self.radius}")

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    @property
    def cardinality(self) -> int:
        return self.side * self.side


class GrayImage:
    """2-D grid of float64 intensities, immutable after construction.

    Values are nominally in [0, 255] but are not clamped: noisy data may
    leave the range. Quantization happens only on file write.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.array(values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be a non-empty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image intensities must be finite")
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        """Read-only (height, width) float64 array, row-major."""
        return self._values

    @property
    def height(self) -> int:
        return self._values.shape[0]

    @property
    def width(self) -> int:
        return self._values.shape[1]

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height})"


def reflect_index(i: int, n: int) -> int:
    """Mirror an index into [0, n): -k maps to k, (n-1)+k maps to (n-1)-k.

    The edge pixel is not duplicated. A single reflection must suffice;
    larger excursions raise.
    """
    if i < 0:
        i = -i
    elif i >= n:
        i = 2 * (n - 1) - i
    if not 0 <= i < n:
        raise ValueError(f"index {i} not recoverable by one reflection (axis size {n})")
    return i


def mirror_read(img: GrayImage, p: PixelCoord) -> float:
    """Intensity at p, reading out-of-range coordinates through the mirror rule."""
    return float(img.values[reflect_index(p.row, img.height), reflect_index(p.col, img.width)])


def window_pixels(spec: WindowSpec) -> list[PixelCoord]:
    """All (2r+1)^2 coordinates of the window in row-major order.

    Coordinates may fall outside the image; callers resolve them through
    mirror_read.
    """
    r = spec.radius
    ci, cj = spec.center
    return [PixelCoord(ci + di, cj + dj) for di in range(-r, r + 1) for dj in range(-r, r + 1)]


def mirror_pad(img: GrayImage, pad: int) -> np.ndarray:
    """Image extended by `pad` on every side with the mirror convention.

    Requires pad < min(height, width) so a single reflection covers the
    extension (matches reflect_index).
    """
    if pad < 0:
        raise ValueError("pad must be >= 0")
    if pad >= min(img.height, img.width):
        raise ValueError(
            f"pad {pad} too large for {img.width}x{img.height} image; "
            "window radii must stay below the smaller image dimension"
        )
    if pad == 0:
        return img.values.copy()
    return np.pad(img.values, pad, mode="reflect")


def reflect_indices(idx: np.ndarray, n: int) -> np.ndarray:
    """Vectorized reflect_index; rejects indices needing more than one reflection."""
    out = np.where(idx < 0, -idx, idx)
    out = np.where(out >= n, 2 * (n - 1) - out, out)
    if out.min() < 0 or out.max() >= n:
        raise ValueError(f"indices not recoverable by one reflection (axis size {n})")
    return out
