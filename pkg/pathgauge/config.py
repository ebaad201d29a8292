"""
Configuration constants for pathgauge.
"""

from pathlib import Path

# =========================
# Paths and Files
# =========================
DATA_DIR = Path(__file__).parent / "data"
PRESETS_PATH = DATA_DIR / "presets"
DEFAULT_OUTPUT_DIR = "pathgauge_output"

# Names in the order `pathgauge list` prints them.
PRESET_NAMES = (
    "velocity-gauge",
    "length-gauge",
    "fock-schwinger",
    "gauge-flux-links",
    "dirac-monopole",
    "disk-flux",
    "eblock-flux",
    "classical-uniform-B",
    "oned-pair",
)

SCHEMA_VERSION = 1

# =========================
# Quadrature
# =========================
QUAD_ORDER = 32
QUAD_ORDER_LOW = 16
QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 20
ROUNDOFF_FACTOR = 100.0

# Discontinuity crossings along a segment
CROSSING_SAMPLES = 65
BISECT_TOL = 1e-12
# A sampled local minimum of |d| this far below max |d| without a sign change is a touch
TOUCH_RTOL = 1e-9
# Scan of the outer path for changes in how the inner path meets the walls
NESTED_SCAN_SAMPLES = 33
# Break points closer than this (local s) are merged into one
BREAK_MERGE_GAP = 1e-9

# =========================
# Geometry
# =========================
SINGULAR_GUARD = 1e-9
STRING_CLEARANCE = 1e-6
R_FAR_FACTOR = 1e4
JUNCTION_TOL = 1e-12
WAYPOINT_CONTINUITY_TOL = 1e-8

# Finite differences
FD_STEP = 1e-6
FD_MIN_STEP = 1e-14
STENCIL_STEP = 1e-4
SLICE_DELTA = 1e-8

# =========================
# Classical World Lines
# =========================
ODE_TOL = 1e-10
ODE_ATOL_FACTOR = 1e-2
SHOOTING_TOL = 1e-9
SHOOTING_MAX_ITER = 50
SHOOTING_FD_STEP = 1e-6
SHOOTING_MAX_COND = 1e12
CLASSICAL_FD_STEP = 1e-3
CLASSICAL_QUAD_TOL = 1e-8

# =========================
# Quantization
# =========================
PHASE_TOLERANCE = 1e-6

# =========================
# Runner / CLI
# =========================
THREADS_ENV = "PATHGAUGE_THREADS"
DEFAULT_THREADS = 1
DEFAULT_SEED = 20240101
CSV_DIGITS = 17
