"""owf: optimal-weights patch filtering for grayscale image denoising.

The core filter averages noisy pixels over a search window with weights that
minimize a bias/variance bound on the mean square error; the minimizing
weights are triangular in patch dissimilarity with an exactly-solvable
per-pixel bandwidth. Oracle, checkerboard-split, and non-local-means variants
share the same machinery, and a benchmark harness measures PSNR against clean
references under seeded Gaussian noise.
"""

from .grid import GrayImage, PixelCoord, WindowSpec, mirror_read, window_pixels
from .solver import (
    BandwidthSolution,
    DegenerateProfileError,
    DissimilarityProfile,
    WeightMap,
    dissimilarity_mass,
    kkt_multipliers,
    kkt_weights,
    optimal_weights,
    risk_bound,
    solve_bandwidth,
)
from .similarity import (
    SimilarityKernel,
    dissimilarity,
    kernel_matrix,
    kernel_weight,
    noise_floor,
    parity_filter,
    patch_distance,
    patch_distance_squared,
    split_dissimilarity,
)
from .filters import (
    DenoiseResult,
    FilterConfig,
    denoise,
    export_weight_map,
    nlm_denoise,
    nlm_sweep,
    oracle_filter,
    owf_denoise,
    owf_split_denoise,
)
from .noise import NoiseSpec, add_noise
from .metrics import MetricsReport, compute_metrics, psnr_db
from .image_io import (
    ImageIOError,
    MalformedHeaderError,
    UnsupportedFormatError,
    read_image,
    write_image,
)

__version__ = "0.1.0"

__all__ = [
    "GrayImage",
    "PixelCoord",
    "WindowSpec",
    "mirror_read",
    "window_pixels",
    "BandwidthSolution",
    "DegenerateProfileError",
    "DissimilarityProfile",
    "WeightMap",
    "dissimilarity_mass",
    "kkt_multipliers",
    "kkt_weights",
    "optimal_weights",
    "risk_bound",
    "solve_bandwidth",
    "SimilarityKernel",
    "dissimilarity",
    "kernel_matrix",
    "kernel_weight",
    "noise_floor",
    "parity_filter",
    "patch_distance",
    "patch_distance_squared",
    "split_dissimilarity",
    "DenoiseResult",
    "FilterConfig",
    "denoise",
    "export_weight_map",
    "nlm_denoise",
    "nlm_sweep",
    "oracle_filter",
    "owf_denoise",
    "owf_split_denoise",
    "NoiseSpec",
    "add_noise",
    "MetricsReport",
    "compute_metrics",
    "psnr_db",
    "ImageIOError",
    "MalformedHeaderError",
    "UnsupportedFormatError",
    "read_image",
    "write_image",
]
