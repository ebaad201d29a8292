"""
Path-dependent vector potential engine.

    A_mu(P, x) = int_0^1 F_{nu lambda}(y) dy^nu/ds dy^lambda/dx^mu ds

The integral is a pullback, so it is evaluated per segment in local s, with
each segment split where it crosses a declared field discontinuity.
"""

from __future__ import annotations

import cmath
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from pathgauge.config import BREAK_MERGE_GAP, STENCIL_STEP, QUAD_MAX_DEPTH, QUAD_ORDER, QUAD_TOL
from pathgauge.errors import StencilError
from pathgauge.fields import FieldConfig, SurfaceFn
from pathgauge.paths import PathFamily, SegmentSpec, straight_line_path
from pathgauge.quadrature import QuadResult, crossings, get_rule
from pathgauge.spacetime import NATURAL, Constants, VectorLike, as_array, lower, minkowski_dot

logger = logging.getLogger(__name__)

FORMS = ("plain", "antisymmetrized")
Potential = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class PotentialSample:
    """Covariant A_mu at x with its quadrature error estimate."""

    x: np.ndarray
    A: np.ndarray
    err_estimate: float
    path_id: str

    def __post_init__(self):
        if self.err_estimate < 0:
            raise ValueError(f"err_estimate must be >= 0, got {self.err_estimate}")

    @property
    def A_upper(self) -> np.ndarray:
        """Contravariant A^mu, the form closed-form gauges are quoted in."""
        return lower(self.A)


def _integrand(field: FieldConfig, path: PathFamily, k: int, x: np.ndarray, form: str):
    seg = path.segments[k]

    def fn(s: np.ndarray) -> np.ndarray:
        y = seg.point(s, x)
        dyds, dydx = path.segment_jacobians(k, s, x)
        F = field.evaluate(y)
        plain = np.einsum("nab,na,nbm->nm", F, dyds, dydx)
        if form == "plain":
            return plain
        swapped = np.einsum("nab,nb,nam->nm", F, dyds, dydx)
        return 0.5 * (plain - swapped)

    return fn


def segment_breaks(field: FieldConfig, path: PathFamily, k: int, x: np.ndarray) -> list[float]:
    """Local parameters where segment k crosses a declared discontinuity surface."""
    return _surface_breaks(field.discontinuities, path.segments[k], x)


def _merge_close(breaks: Sequence[float], gap: float = BREAK_MERGE_GAP) -> list[float]:
    """Sorted breaks with clusters closer than gap replaced by their mean."""
    clusters: list[list[float]] = []
    for b in sorted(breaks):
        if clusters and b - clusters[-1][-1] <= gap:
            clusters[-1].append(b)
        else:
            clusters.append([b])
    return [float(np.mean(c)) for c in clusters]


def _surface_breaks(surfaces: Sequence[SurfaceFn], seg, x: np.ndarray) -> list[float]:
    breaks: list[float] = []
    for surface in surfaces:
        breaks.extend(crossings(lambda s: surface(seg.point(s, x))))
    return sorted(set(breaks))


def potential_at(
    field: FieldConfig,
    path: PathFamily,
    x: VectorLike,
    form: str = "plain",
    *,
    tol: float = QUAD_TOL,
    order: int = QUAD_ORDER,
    max_depth: int = QUAD_MAX_DEPTH,
) -> PotentialSample:
    """
    Covariant A_mu(P, x) by adaptive Gauss-Legendre quadrature.

    Args:
        field: field configuration
        path: path family ending at x
        x: evaluation point
        form: "plain" or "antisymmetrized" integrand
        tol: absolute tolerance per segment

    Raises:
        SingularityError: x or a quadrature node is inside a singular guard zone
        PathError: x violates the path's clearance rule
        QuadratureError: a segment does not converge
    """
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")
    x = as_array(x).astype(float)
    field.check_singular(x)
    path.check_clearance(x)
    rule = get_rule(order)
    total = np.zeros(4)
    err = 0.0
    for k in range(path.n_segments):
        breaks = segment_breaks(field, path, k, x)
        res: QuadResult = rule.integrate(
            _integrand(field, path, k, x, form), 0.0, 1.0, tol=tol, max_depth=max_depth, breakpoints=breaks
        )
        total = total + res.value
        err += res.error
        if breaks:
            logger.debug("%s segment %d split at %s", path.name, k, ["%.6g" % b for b in breaks])
    return PotentialSample(x=x, A=total, err_estimate=err, path_id=path.name)


def potential_field(field: FieldConfig, path: PathFamily, **quad) -> Potential:
    """The path-dependent potential as a contravariant callable on (4,) or (N, 4) points."""

    def A(points):
        pts = as_array(points)
        if pts.ndim == 1:
            return potential_at(field, path, pts, **quad).A_upper
        return np.array([potential_at(field, path, p, **quad).A_upper for p in pts])

    return A


def potential_grid(
    field: FieldConfig,
    path: PathFamily,
    grid: Sequence[VectorLike],
    form: str = "plain",
    *,
    workers: int = 1,
    **quad,
) -> list[PotentialSample]:
    """potential_at over a grid; results come back in grid order for any worker count."""

    def one(x):
        return potential_at(field, path, x, form, **quad)

    if workers <= 1:
        return [one(x) for x in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, grid))


# =========================
# Line Integrals
# =========================
def line_integral(
    potential: Potential,
    path: PathFamily,
    x: VectorLike,
    *,
    tol: float = QUAD_TOL,
    order: int = QUAD_ORDER,
    max_depth: int = QUAD_MAX_DEPTH,
    segments: Optional[Sequence[int]] = None,
    discontinuities: Sequence[SurfaceFn] = (),
    extra_breaks: Optional[Callable[[SegmentSpec], Sequence[float]]] = None,
    strict: bool = True,
) -> QuadResult:
    """
    int_P A_mu dy^mu for a contravariant potential, summed segment by segment.

    Segments are split where they cross `discontinuities`, the surfaces on
    which a potential built from a confined field may jump, and at the local
    parameters `extra_breaks(segment)` returns. With strict=False a segment
    that misses the tolerance keeps its error estimate instead of raising.
    """
    x = as_array(x).astype(float)
    rule = get_rule(order)
    total = 0.0
    err = 0.0
    panels = 0
    indices = range(path.n_segments) if segments is None else segments
    for k in indices:
        seg = path.segments[k]

        def fn(s, seg=seg, k=k):
            y = seg.point(s, x)
            dyds, _ = path.segment_jacobians(k, s, x)
            return minkowski_dot(potential(y), dyds)

        breaks = _surface_breaks(discontinuities, seg, x)
        if extra_breaks is not None:
            breaks = _merge_close(list(breaks) + list(extra_breaks(seg)))
        res = rule.integrate(fn, 0.0, 1.0, tol=tol, max_depth=max_depth, breakpoints=breaks, strict=strict)
        total += float(res.value)
        err += res.error
        panels += res.panels
    return QuadResult(total, err, panels)


# =========================
# Gauge Dictionary
# =========================
@dataclass(frozen=True)
class GaugeReport:
    """Deviation between quadrature and a closed form, contravariant components."""

    max_deviation: float
    mean_deviation: float
    points: int
    max_error_estimate: float


def gauge_compare(
    field: FieldConfig,
    path: PathFamily,
    closed_form: Potential,
    grid: Sequence[VectorLike],
    *,
    workers: int = 1,
    **quad,
) -> GaugeReport:
    """Max and mean componentwise |A_num - A_closed| over a grid."""
    if len(grid) == 0:
        raise ValueError("gauge_compare needs a nonempty grid")
    samples = potential_grid(field, path, grid, workers=workers, **quad)
    return gauge_report(samples, closed_form)


def deviations(samples: Sequence[PotentialSample], closed_form: Potential) -> np.ndarray:
    """Componentwise |A^mu_num - A^mu_closed| per sample, shape (N, 4)."""
    numeric = np.array([s.A_upper for s in samples])
    exact = np.atleast_2d(closed_form(np.array([s.x for s in samples])))
    return np.abs(numeric - exact)


def gauge_report(samples: Sequence[PotentialSample], closed_form: Potential) -> GaugeReport:
    dev = deviations(samples, closed_form)
    return GaugeReport(
        max_deviation=float(dev.max()),
        mean_deviation=float(dev.mean()),
        points=len(samples),
        max_error_estimate=max(s.err_estimate for s in samples),
    )


def path_transform(
    field: FieldConfig,
    path_a: PathFamily,
    path_b: PathFamily,
    x: VectorLike,
    stencil_step: float = STENCIL_STEP,
    *,
    flux: Optional[Callable[[np.ndarray], float]] = None,
    **quad,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Check A(P_b) - A(P_a) = d_mu Phi_EM at x.

    Returns covariant (lhs, rhs): the potential difference and the central
    difference gradient of the flux of the loop path_a - path_b.

    Raises:
        StencilError: the stencil straddles a field discontinuity.
    """
    from pathgauge.flux import electromagnetic_flux

    x = as_array(x).astype(float)
    if not stencil_step > 0:
        raise ValueError(f"stencil_step must be positive, got {stencil_step}")
    stencil = np.array([x + sign * stencil_step * e for e in np.eye(4) for sign in (1.0, -1.0)])
    for surface in field.discontinuities:
        values = surface(np.vstack([x[None, :], stencil]))
        if np.any(values == 0.0) or (values.min() < 0.0 < values.max()):
            raise StencilError(f"stencil of size {stencil_step:g} around {x.tolist()} crosses a discontinuity")

    if flux is None:
        def flux(point):
            return electromagnetic_flux(field, path_a, path_b, point, **quad).value

    lhs = potential_at(field, path_b, x, **quad).A - potential_at(field, path_a, x, **quad).A
    values = np.array([flux(p) for p in stencil]).reshape(4, 2)
    rhs = (values[:, 0] - values[:, 1]) / (2.0 * stencil_step)
    return lhs, rhs


# =========================
# Nonintegrable Phase
# =========================
def nonintegrable_phase(
    field: Optional[FieldConfig],
    path: PathFamily,
    x: VectorLike,
    constants: Constants = NATURAL,
    *,
    potential: Optional[Potential] = None,
    reference_path: Optional[PathFamily] = None,
    **quad,
) -> complex:
    """
    exp(-i e / (hbar c) int_P A_mu dy^mu).

    Without an explicit potential, A(P_ref, .) is used with P_ref the straight
    line from the field's reference point (or `reference_path` when given).
    """
    if field is None and potential is None:
        raise ValueError("nonintegrable_phase needs a field or an explicit potential")
    x = as_array(x).astype(float)
    if potential is None:
        ref = reference_path if reference_path is not None else straight_line_path(field.reference_point)
        potential = potential_field(field, ref, **quad)
    walls = field.discontinuities if field is not None else ()
    integral = line_integral(potential, path, x, discontinuities=walls, **quad).value
    return cmath.exp(-1j * constants.e * integral / (constants.hbar * constants.c))
