"""
Electromagnetic flux through the loop path_a - path_b, three ways:

- loop:    N * oint A_mu dy^mu of a supplied potential
- surface: int int F_{nu mu} dy^nu/du dy^mu/dv du dv over a spanning surface
- open:    int_{path_a} A_mu(path_b, y) dy^mu

The surface (u, v) boundary, walked counterclockwise, traces path_a forward
and path_b backward, so all three routes share one orientation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from pathgauge.config import BISECT_TOL, NESTED_SCAN_SAMPLES, QUAD_MAX_DEPTH, QUAD_ORDER, QUAD_TOL, SLICE_DELTA
from pathgauge.fields import FieldConfig, SurfaceFn
from pathgauge.paths import ClosedCurve, LoopSpec, PathFamily, SegmentSpec
from pathgauge.potential import Potential, line_integral, potential_field
from pathgauge.quadrature import crossings, get_rule
from pathgauge.spacetime import VectorLike, as_array

logger = logging.getLogger(__name__)

ROUTES = ("loop", "surface", "open")
SAMPLE_LINES = (0.0, 0.25, 0.5, 0.75, 1.0)
NESTED_TOL_FACTOR = 1e-2


@dataclass(frozen=True)
class FluxResult:
    value: float
    route: str
    err_estimate: float
    flagged: bool = False
    note: str = ""

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"unknown flux route {self.route!r}")
        if self.err_estimate < 0:
            raise ValueError(f"err_estimate must be >= 0, got {self.err_estimate}")


def _nested(tol: float) -> float:
    return tol * NESTED_TOL_FACTOR


# =========================
# Loop and Open Routes
# =========================
def flux_loop(
    potential: Potential,
    loop: LoopSpec,
    x: VectorLike,
    *,
    tol: float = QUAD_TOL,
    order: int = QUAD_ORDER,
    max_depth: int = QUAD_MAX_DEPTH,
    discontinuities: Sequence[SurfaceFn] = (),
) -> FluxResult:
    """N * (int_{path_a} A dy - int_{path_b} A dy) for a contravariant potential."""
    quad = {"tol": tol, "order": order, "max_depth": max_depth, "discontinuities": discontinuities}
    ia = line_integral(potential, loop.path_a, x, **quad)
    ib = line_integral(potential, loop.path_b, x, **quad)
    n = loop.winding
    return FluxResult(n * (float(ia.value) - float(ib.value)), "loop", n * (ia.error + ib.error))


def _wall_pattern(field: FieldConfig, path: PathFamily, y: np.ndarray) -> tuple[int, ...]:
    """How many times each segment of the path ending at y crosses each wall."""
    return tuple(
        len(crossings(lambda t, seg=seg, d=d: d(seg.point(t, y)), report_touches=False))
        for seg in path.segments
        for d in field.discontinuities
    )


def nested_breaks(
    field: FieldConfig,
    inner: PathFamily,
    seg: SegmentSpec,
    x: np.ndarray,
    samples: int = NESTED_SCAN_SAMPLES,
) -> list[float]:
    """
    Local parameters on `seg` where A(inner, y) is not smooth.

    A(inner, y) has a kink or jump wherever a segment of the inner path ending
    at y starts or stops crossing a wall: a vertex moving onto the wall, or a
    segment turning tangent to it. Those are the points where the crossing
    pattern changes; each change is bisected down to BISECT_TOL.
    """
    if not field.discontinuities:
        return []

    def pattern(s: float) -> tuple[int, ...]:
        return _wall_pattern(field, inner, seg.point(np.array([s]), x)[0])

    grid = np.linspace(0.0, 1.0, samples)
    patterns = [pattern(s) for s in grid]
    breaks: list[float] = []
    for lo, hi, p_lo, p_hi in zip(grid[:-1], grid[1:], patterns[:-1], patterns[1:]):
        if p_lo == p_hi:
            continue
        while hi - lo > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if pattern(mid) == p_lo:
                lo = mid
            else:
                hi = mid
        breaks.append(0.5 * (lo + hi))
    return breaks


def flux_open(
    field: FieldConfig,
    path_a: PathFamily,
    path_b: PathFamily,
    x: VectorLike,
    *,
    tol: float = QUAD_TOL,
    order: int = QUAD_ORDER,
    max_depth: int = QUAD_MAX_DEPTH,
) -> FluxResult:
    """
    int along path_a of A(path_b, y) dy.

    Equals the loop flux when path_b collapses at x0. For confined fields the
    identity can fail; the value is returned with flagged=True, and a
    quadrature that misses the tolerance is reported in the note and the
    error estimate instead of raising.
    """
    x = as_array(x).astype(float)
    inner = potential_field(field, path_b, tol=_nested(tol), order=order, max_depth=max_depth)
    res = line_integral(
        inner,
        path_a,
        x,
        tol=tol,
        order=order,
        max_depth=max_depth,
        discontinuities=field.discontinuities,
        extra_breaks=lambda seg: nested_breaks(field, path_b, seg, x),
        strict=not field.confined,
    )
    flagged = field.confined
    note = ""
    if flagged:
        note = "confined field: open integral may differ from the enclosed flux"
        if res.error > tol:
            note += f"; quadrature error estimate {res.error:.3g} above tolerance"
        logger.warning("flux_open on confined field '%s' at %s: %s", field.name, as_array(x).tolist(), note)
    return FluxResult(float(res.value), "open", res.error, flagged, note)


# =========================
# Surfaces
# =========================
@dataclass(frozen=True, eq=False)
class SurfaceSpec:
    """
    Embedded 2-surface y(u, v) on the unit square with its tangent vectors.

    `point`, `du` and `dv` take equal-shape arrays u, v and return (M, 4).
    `u_breaks` / `v_breaks` are parameter values where the map is not smooth.
    """

    name: str
    point: Callable[[np.ndarray, np.ndarray], np.ndarray]
    du: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dv: Callable[[np.ndarray, np.ndarray], np.ndarray]
    u_breaks: tuple[float, ...] = ()
    v_breaks: tuple[float, ...] = ()
    params: dict = dc_field(default_factory=dict)


def homotopy_surface(path_a: PathFamily, path_b: PathFamily, x: VectorLike) -> SurfaceSpec:
    """y(u, v) = (1 - v) path_a(u) + v path_b(u)."""
    x = as_array(x).astype(float)

    def both(u):
        pa, da, _ = path_a.evaluate(u, x)
        pb, db, _ = path_b.evaluate(u, x)
        return pa, da, pb, db

    def point(u, v):
        pa, _, pb, _ = both(u)
        return (1.0 - v)[:, None] * pa + v[:, None] * pb

    def du(u, v):
        _, da, _, db = both(u)
        return (1.0 - v)[:, None] * da + v[:, None] * db

    def dv(u, v):
        pa, _, pb, _ = both(u)
        return pb - pa

    breaks = tuple(sorted(set(path_a.junctions) | set(path_b.junctions)))
    return SurfaceSpec(f"homotopy({path_a.name},{path_b.name})", point, du, dv, u_breaks=breaks)


def sphere_slice_surface(radius: float, phi: float, center: VectorLike = (0.0, 0.0, 0.0, 0.0)) -> SurfaceSpec:
    """Sphere slice of azimuthal opening phi: u -> azimuth phi*u, v -> polar angle pi*v."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    c = as_array(center).astype(float)

    def point(u, v):
        th, ph = np.pi * v, phi * u
        out = np.zeros((len(u), 4))
        out[:, 1] = radius * np.sin(th) * np.cos(ph)
        out[:, 2] = radius * np.sin(th) * np.sin(ph)
        out[:, 3] = radius * np.cos(th)
        return out + c

    def du(u, v):
        th, ph = np.pi * v, phi * u
        out = np.zeros((len(u), 4))
        out[:, 1] = -radius * phi * np.sin(th) * np.sin(ph)
        out[:, 2] = radius * phi * np.sin(th) * np.cos(ph)
        return out

    def dv(u, v):
        th, ph = np.pi * v, phi * u
        out = np.zeros((len(u), 4))
        out[:, 1] = radius * np.pi * np.cos(th) * np.cos(ph)
        out[:, 2] = radius * np.pi * np.cos(th) * np.sin(ph)
        out[:, 3] = -radius * np.pi * np.sin(th)
        return out

    return SurfaceSpec("sphere_slice", point, du, dv, params={"radius": radius, "phi": phi})


def spacetime_rectangle_surface(ct_range: Sequence[float], x_range: Sequence[float]) -> SurfaceSpec:
    """Rectangle in the (ct, x) plane; u runs along ct, v along x."""
    (t0, t1), (x0, x1) = ct_range, x_range
    lt, lx = t1 - t0, x1 - x0

    def point(u, v):
        out = np.zeros((len(u), 4))
        out[:, 0] = t0 + u * lt
        out[:, 1] = x0 + v * lx
        return out

    def du(u, v):
        out = np.zeros((len(u), 4))
        out[:, 0] = lt
        return out

    def dv(u, v):
        out = np.zeros((len(u), 4))
        out[:, 1] = lx
        return out

    return SurfaceSpec("spacetime_rectangle", point, du, dv, params={"ct_range": [t0, t1], "x_range": [x0, x1]})


def star_surface(curve: ClosedCurve, center: VectorLike) -> SurfaceSpec:
    """Cone from `center` over a closed curve: y = c + v (curve(1 - u) - c); boundary is +curve."""
    c = as_array(center).astype(float)

    def point(u, v):
        return c + v[:, None] * (curve.point(1.0 - u) - c)

    def du(u, v):
        return -v[:, None] * curve.tangent(1.0 - u)

    def dv(u, v):
        return curve.point(1.0 - u) - c

    return SurfaceSpec("star", point, du, dv, u_breaks=tuple(sorted(1.0 - b for b in curve.breaks)))


def _consistent_u_breaks(field: FieldConfig, surface: SurfaceSpec) -> list[float]:
    """Discontinuity crossings in u that sit at the same u on every sampled line v."""
    found: list[float] = []
    for d in field.discontinuities:
        per_line = []
        for v0 in SAMPLE_LINES:
            per_line.append(crossings(lambda u, v0=v0: d(surface.point(u, np.full(len(u), v0)))))
        for root in per_line[0]:
            if all(any(abs(root - r) < 1e-9 for r in roots) for roots in per_line[1:]):
                found.append(root)
    return found


def flux_surface(
    field: FieldConfig,
    surface: SurfaceSpec,
    *,
    tol: float = QUAD_TOL,
    order: int = QUAD_ORDER,
    max_depth: int = QUAD_MAX_DEPTH,
) -> FluxResult:
    """
    Iterated adaptive Gauss-Legendre over the unit square.

    The inner v-integral of each u line is split at discontinuity crossings;
    the outer u-integral is split at the surface breaks and at crossings that
    hold for every sampled v line.
    """
    rule = get_rule(order)
    inner_tol = _nested(tol)
    inner_err = [0.0]

    def density(u0: float):
        def fn(v):
            u = np.full(len(v), u0)
            F = field.evaluate(surface.point(u, v))
            return np.einsum("nab,na,nb->n", F, surface.du(u, v), surface.dv(u, v))

        return fn

    def line(u0: float) -> float:
        breaks = list(surface.v_breaks)
        for d in field.discontinuities:
            breaks.extend(crossings(lambda v: d(surface.point(np.full(len(v), u0), v))))
        res = rule.integrate(density(u0), 0.0, 1.0, tol=inner_tol, max_depth=max_depth, breakpoints=breaks)
        inner_err[0] = max(inner_err[0], res.error)
        return float(res.value)

    def outer(u):
        return np.array([line(u0) for u0 in u])

    u_breaks = list(surface.u_breaks) + _consistent_u_breaks(field, surface)
    res = rule.integrate(outer, 0.0, 1.0, tol=tol, max_depth=max_depth, breakpoints=u_breaks)
    logger.debug("surface %s: %d outer panels, inner error <= %.3g", surface.name, res.panels, inner_err[0])
    return FluxResult(float(res.value), "surface", res.error + inner_err[0])


def full_sphere_flux(
    field: FieldConfig,
    radius: float,
    center: VectorLike = (0.0, 0.0, 0.0, 0.0),
    delta: float = SLICE_DELTA,
    **quad,
) -> FluxResult:
    """The phi -> 2 pi limit of sphere slices, by linear extrapolation from 2 pi - delta and 2 pi - 2 delta."""
    near = flux_surface(field, sphere_slice_surface(radius, 2.0 * np.pi - delta, center), **quad)
    nearer = flux_surface(field, sphere_slice_surface(radius, 2.0 * np.pi - 2.0 * delta, center), **quad)
    value = 2.0 * near.value - nearer.value
    return FluxResult(value, "surface", 2.0 * near.err_estimate + nearer.err_estimate)


# =========================
# Route Selection
# =========================
def electromagnetic_flux(
    field: FieldConfig,
    path_a: PathFamily,
    path_b: PathFamily,
    x: VectorLike,
    background: Optional[Potential] = None,
    **quad,
) -> FluxResult:
    """
    Phi_EM(x) of the loop path_a - path_b.

    Uses the background potential when given, the open route for nonconfined
    fields, and otherwise the loop integral of the computed A(path_a, .).
    """
    loop = LoopSpec(path_a, path_b)
    walls = field.discontinuities
    if background is not None:
        return flux_loop(background, loop, x, discontinuities=walls, **quad)
    if not field.confined:
        return flux_open(field, path_a, path_b, x, **quad)
    tol = quad.get("tol", QUAD_TOL)
    inner_quad = {**quad, "tol": _nested(tol)}
    return flux_loop(potential_field(field, path_a, **inner_quad), loop, x, discontinuities=walls, **quad)
