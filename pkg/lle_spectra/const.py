# File: lle_spectra/const.py
"""Constants for the LLE spectra library."""

import json
from pathlib import Path
from typing import Final

MANIFEST_PATH = Path(__file__).parent / "manifest.json"
with open(MANIFEST_PATH, encoding="utf-8") as f:
    LIBRARY_VERSION: Final[str] = json.load(f).get("version", "0.0.0")

DOMAIN: Final[str] = "lle_spectra"

PHANTOM_DIR: Final[Path] = Path(__file__).parent / "phantoms"

# Environment
ENV_THREADS: Final[str] = "LLE_SPECTRA_THREADS"

# Exit codes
EXIT_OK: Final[int] = 0
EXIT_USAGE: Final[int] = 2
EXIT_NUMERICAL: Final[int] = 3

# Weight solve
DENOMINATOR_TOL: Final[float] = 1e-12
DEGENERATE_FRACTION_LIMIT: Final[float] = 0.01

# Eigensolvers
DENSE_FALLBACK_MAX_N: Final[int] = 3000
DEFAULT_EIG_TOL: Final[float] = 1e-10
DEFAULT_MAX_ITER: Final[int] = 5000
RESIDUAL_FACTOR: Final[float] = 1e-6
# shift used for -L, whose spectrum starts at 0 and grows like k^2
GENERATOR_SHIFT: Final[float] = -1.0
# relative shift below 0 for the PSD embedding matrix
EMBEDDING_SHIFT_FACTOR: Final[float] = 1e-9
V0_SEED: Final[int] = 20240229

# Generators
FOURTH_ORDER_SCALE: Final[float] = 280.0

# Diffusion maps
DM_TRUNCATION: Final[float] = 1e-12
DM_BANDWIDTH_NEIGHBOR: Final[int] = 10

# Kernel / pointwise bias
BIAS_CENTERS: Final[int] = 20

# Output
CSV_SIGNIFICANT_DIGITS: Final[int] = 17
MANIFEST_SUFFIX: Final[str] = ".manifest.json"
SIDECAR_SUFFIX: Final[str] = ".json"

# Metrics
METRIC_EUCLIDEAN: Final[str] = "ambient_euclidean"
METRIC_PERIODIC: Final[str] = "periodic_1d"
VALID_METRICS = {METRIC_EUCLIDEAN, METRIC_PERIODIC}

# Samplers
SAMPLER_CIRCLE = "circle"
SAMPLER_SPHERE = "sphere"
SAMPLER_TORUS = "torus"
SAMPLER_FLAT_TORUS = "flat-torus"
SAMPLER_SHEPP_LOGAN = "shepp-logan"
VALID_SAMPLERS = {
    SAMPLER_CIRCLE,
    SAMPLER_SPHERE,
    SAMPLER_TORUS,
    SAMPLER_FLAT_TORUS,
    SAMPLER_SHEPP_LOGAN,
}
VALID_CIRCLE_MODES = {"uniform", "nonuniform"}
VALID_SPHERE_MODES = {"uniform", "perturbed", "fibonacci"}

# Neighborhood rules
RULE_EPS = "eps_radius"
RULE_KNN = "knn"
VALID_RULES = {RULE_EPS, RULE_KNN}

# Theory tables
THEORY_CIRCLE_LB = "circle-lb"
THEORY_CIRCLE_FOURTH = "circle-fourth"
THEORY_SPHERE2 = "sphere2"
VALID_THEORIES = {THEORY_CIRCLE_LB, THEORY_CIRCLE_FOURTH, THEORY_SPHERE2}

# Coefficient tables served by `theory`
THEORY_SPHERE_RHO8 = "sphere-rho8"
THEORY_TORUS_POINTWISE = "torus-pointwise"
THEORY_KNN_RADIUS = "knn-radius"
THEORY_BIAS = "bias"
VALID_COEFFICIENT_TABLES = {
    THEORY_SPHERE_RHO8,
    THEORY_TORUS_POINTWISE,
    THEORY_KNN_RADIUS,
    THEORY_BIAS,
}

# Regularization regimes
REGIME_DENSITY = "density_weighted"
REGIME_BALANCED = "balanced"
REGIME_FOURTH_ORDER = "fourth_order"
REGIME_TRANSITIONAL = "transitional"

# Torus test points
TORUS_OUTER_BOTTOM = "outer_bottom"
TORUS_INNER_BOTTOM = "inner_bottom"
TORUS_POINTS = {
    TORUS_OUTER_BOTTOM: (0.0, 0.0, -1.5),
    TORUS_INNER_BOTTOM: (0.0, 0.0, -0.5),
}

# Curve recovery thresholds used by `compare`
LLE_RECOVERY_THRESHOLD = 0.95
DM_RECOVERY_THRESHOLD = 0.99
COMPARE_RHOS = (-5.0, 3.0, 8.0)
