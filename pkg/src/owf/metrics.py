"""MSE and PSNR for 8-bit-range grayscale images."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GrayImage

__all__ = ["MetricsReport", "compute_metrics", "psnr_db"]

PEAK = 255.0


@dataclass(frozen=True)
class MetricsReport:
    """Mean squared error and 10*log10(255^2 / MSE); psnr_db is +inf at MSE 0."""

    mse: float
    psnr_db: float


def compute_metrics(reference: GrayImage, candidate: GrayImage) -> MetricsReport:
    if reference.values.shape != candidate.values.shape:
        raise ValueError("reference and candidate dimensions differ")
    diff = candidate.values - reference.values
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return MetricsReport(0.0, math.inf)
    return MetricsReport(mse, 10.0 * math.log10(PEAK * PEAK / mse))


def psnr_db(reference: GrayImage, candidate: GrayImage) -> float:
    return compute_metrics(reference, candidate).psnr_db
