"""
Phase quantization checks: e Phi / (hbar c) = 2 pi n and the Dirac condition.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

from pathgauge.config import PHASE_TOLERANCE
from pathgauge.flux import FluxResult
from pathgauge.spacetime import NATURAL, Constants

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QuantizationReport:
    """
    Phase check result. quantized <=> residual <= tolerance; n_nearest = round(phase / 2 pi).

    `trivial` marks n = 0, which is reported but is not a nonzero flux quantum.
    """

    phase: float
    n_nearest: int
    residual: float
    quantized: bool
    tolerance: float
    trivial: bool

    def row(self) -> list:
        return [self.phase, self.n_nearest, self.residual, self.quantized]


def _report(phase: float, tolerance: float) -> QuantizationReport:
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    n = int(round(phase / TWO_PI))
    residual = abs(phase - TWO_PI * n)
    return QuantizationReport(
        phase=phase,
        n_nearest=n,
        residual=residual,
        quantized=residual <= tolerance,
        tolerance=tolerance,
        trivial=n == 0,
    )


def phase_of(flux: Union[FluxResult, float], constants: Constants = NATURAL) -> float:
    """Dimensionless phase e Phi / (hbar c)."""
    value = flux.value if isinstance(flux, FluxResult) else float(flux)
    return constants.e * value / (constants.hbar * constants.c)


def check_phase(
    flux: Union[FluxResult, float],
    constants: Constants = NATURAL,
    tolerance: float = PHASE_TOLERANCE,
) -> QuantizationReport:
    """Flux quantization e Phi / (hbar c) = 2 pi n with signed n."""
    return _report(phase_of(flux, constants), tolerance)


def dirac_condition(
    e: float,
    g: float,
    constants: Constants = NATURAL,
    tolerance: float = PHASE_TOLERANCE,
) -> QuantizationReport:
    """Phase e * 4 pi g / (hbar c); quantized when 2 e g / (hbar c) is an integer."""
    phase = e * 4.0 * math.pi * g / (constants.hbar * constants.c)
    return _report(phase, tolerance)


def scan_charges(
    g: float,
    e_values: Sequence[float],
    constants: Constants = NATURAL,
    tolerance: float = PHASE_TOLERANCE,
) -> list[QuantizationReport]:
    """dirac_condition for each electric charge in e_values."""
    if len(e_values) == 0:
        raise ValueError("scan_charges needs at least one charge")
    reports = [dirac_condition(e, g, constants, tolerance) for e in e_values]
    logger.info(
        "Dirac scan g=%g: %d/%d quantized", g, sum(r.quantized for r in reports), len(reports)
    )
    return reports
