"""Closed-form minimizer of the bias/variance risk bound on the weight simplex.

For a nonnegative dissimilarity profile rho over a search window, the weights
minimizing (sum w*rho)^2 + sigma^2 * sum w^2 subject to w >= 0, sum w = 1 are
triangular in rho: w_i proportional to (a - rho_i)^+, where the bandwidth a is
the unique positive root of sum_i rho_i * (a - rho_i)^+ = sigma^2. The root
has an exact expression found by scanning the sorted profile, so no iterative
solve is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DissimilarityProfile",
    "BandwidthSolution",
    "WeightMap",
    "DegenerateProfileError",
    "dissimilarity_mass",
    "solve_bandwidth",
    "optimal_weights",
    "kkt_multipliers",
    "kkt_weights",
    "risk_bound",
]


class DegenerateProfileError(ValueError):
    """Raised when an operation requires at least one positive dissimilarity."""


@dataclass(frozen=True)
class DissimilarityProfile:
    """Nonnegative dissimilarities, one per search-window pixel, window order.

    center_index marks the estimated pixel itself, where the dissimilarity is
    zero by construction when the profile comes from an image.
    """

    values: np.ndarray
    center_index: int = 0

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)  # copy: callers keep their array
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("profile must be a non-empty 1-D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("profile values must be finite")
        if arr.min() < 0.0:
            raise ValueError("profile values must be nonnegative")
        if not 0 <= self.center_index < arr.size:
            raise ValueError("center_index out of range")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class BandwidthSolution:
    """Root of the bandwidth equation plus the scan state that produced it.

    bandwidth is +inf and degenerate is True when every profile entry is zero
    (the equation then has no finite root and the weights fall back to
    uniform). k_star counts the sorted entries admitted by the scan (1-based,
    so sorted entries [0:k_star] are below the bandwidth).
    """

    bandwidth: float
    k_star: int
    sorted_order: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class WeightMap:
    """Nonnegative weights over a search window summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        arr = np.array(self.weights, dtype=np.float64)  # copy: callers keep their array
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("weights must be a non-empty 1-D array")
        if arr.min() < 0.0:
            raise ValueError("weights must be nonnegative")
        total = float(arr.sum())
        if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=1e-12):
            raise ValueError(f"weights must sum to 1 (got {total!r})")
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)

    def __len__(self) -> int:
        return self.weights.size


def dissimilarity_mass(profile: DissimilarityProfile, t: float) -> float:
    """sum_i rho_i * (t - rho_i)^+ : nondecreasing in t, zero at t = 0."""
    if t < 0.0:
        raise ValueError("t must be >= 0")
    rho = profile.values
    return float(np.sum(rho * np.maximum(t - rho, 0.0)))


def _scan_bandwidth(sorted_rho: np.ndarray, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact root of the bandwidth equation from ascending-sorted profiles.

    Candidate roots a_k = (sigma^2 + sum_{i<=k} rho_i^2) / sum_{i<=k} rho_i
    (infinite over an all-zero prefix) are admissible while a_k >= rho_k; once
    the test fails it fails for all later k, so the root is the last
    admissible candidate. Axis 0 indexes the sorted entries, so a (M,) profile
    and an (M, ...) stack of per-pixel profiles both work. Returns the
    bandwidth and the 1-based count of admitted entries, shaped like one
    profile slot.
    """
    c1 = np.cumsum(sorted_rho, axis=0)
    c2 = np.cumsum(sorted_rho * sorted_rho, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ak = (sigma * sigma + c2) / c1
    ak[c1 == 0.0] = np.inf
    mask = ak >= sorted_rho
    mask[0] = True  # k = 1 is always admissible; guards rounding at the boundary
    last = np.asarray(sorted_rho.shape[0] - 1 - mask[::-1].argmax(axis=0))
    a = np.take_along_axis(ak, np.expand_dims(last, 0), axis=0)[0]
    return a, last + 1


def solve_bandwidth(profile: DissimilarityProfile, sigma: float) -> BandwidthSolution:
    """Bandwidth a with dissimilarity_mass(profile, a) = sigma^2, exactly.

    All-zero profiles are degenerate (no finite root; bandwidth reported as
    +inf). The result is invariant under permutation of the profile.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be > 0")
    rho = profile.values
    order = np.argsort(rho, kind="stable")
    srt = rho[order]
    if srt[-1] == 0.0:
        return BandwidthSolution(math.inf, len(rho), order, degenerate=True)
    a, k_star = _scan_bandwidth(srt, sigma)
    return BandwidthSolution(float(a), int(k_star), order)


def optimal_weights(profile: DissimilarityProfile, sigma: float) -> WeightMap:
    """Risk-bound-minimizing weights: w_i proportional to (a - rho_i)^+.

    Degenerate profiles get uniform weights. Weights are a nonincreasing
    function of the dissimilarity, and entries at or above the bandwidth get
    exactly zero.
    """
    sol = solve_bandwidth(profile, sigma)
    a = 1.0 if sol.degenerate else sol.bandwidth
    w = np.maximum(a - profile.values, 0.0)
    total = float(np.cumsum(w)[-1])
    return WeightMap(w / total)


def kkt_multipliers(profile: DissimilarityProfile, sigma: float) -> tuple[float, float]:
    """Stationarity multipliers (b, lambda) of the simplex problem.

    lambda = sigma^2 / sum_i (a - rho_i)^+ equals sum_i w_i * rho_i at the
    optimum, and b = lambda * a. Diagnostic values; requires a non-degenerate
    profile.
    """
    sol = solve_bandwidth(profile, sigma)
    if sol.degenerate:
        raise DegenerateProfileError("all-zero profile has no KKT multipliers")
    lam = sigma * sigma / float(np.sum(np.maximum(sol.bandwidth - profile.values, 0.0)))
    return lam * sol.bandwidth, lam


def kkt_weights(profile: DissimilarityProfile, sigma: float) -> WeightMap:
    """Weights from the stationarity form w_i = (b - lambda*rho_i)^+ / sigma^2.

    Coincides with optimal_weights; exists as an independent consistency
    check. Requires a non-degenerate profile.
    """
    b, lam = kkt_multipliers(profile, sigma)
    w = np.maximum(b - lam * profile.values, 0.0) / (sigma * sigma)
    return WeightMap(w / float(np.sum(w)))


def risk_bound(profile: DissimilarityProfile, weights: WeightMap, sigma: float) -> float:
    """(sum w*rho)^2 + sigma^2 * sum w^2, the bound the weights minimize."""
    if sigma <= 0.0:
        raise ValueError("sigma must be > 0")
    if len(weights) != len(profile):
        raise ValueError("weights and profile lengths differ")
    w = weights.weights
    rho = profile.values
    bias = float(np.dot(w, rho))
    return bias * bias + sigma * sigma * float(np.dot(w, w))
