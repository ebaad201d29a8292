"""
pathgauge: path-dependent vector potentials built from the field strength,
electromagnetic fluxes between paths, and phase quantization checks.
"""

from pathgauge.fields import FieldConfig
from pathgauge.flux import FluxResult, electromagnetic_flux, flux_loop, flux_open, flux_surface
from pathgauge.paths import LoopSpec, PathFamily, builtin_path
from pathgauge.potential import PotentialSample, gauge_compare, nonintegrable_phase, path_transform, potential_at
from pathgauge.quantization import QuantizationReport, check_phase, dirac_condition
from pathgauge.spacetime import NATURAL, Constants, FourVector, minkowski_dot

__version__ = "0.1.0"
