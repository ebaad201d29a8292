"""
(1+1)-dimensional electrodynamics: causal fields of point charges on
piecewise-linear world lines, the pair-creation flux and the quantization
condition alpha1 * A = pi n.

Events are (ct, x) pairs; light rays have unit slope in these coordinates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma

from pathgauge.config import BISECT_TOL, PHASE_TOLERANCE, QUAD_MAX_DEPTH, QUAD_ORDER, QUAD_TOL
from pathgauge.errors import GeometryError
from pathgauge.fields import step
from pathgauge.quadrature import get_rule
from pathgauge.quantization import QuantizationReport, _report
from pathgauge.spacetime import NATURAL, Constants

logger = logging.getLogger(__name__)

ENDPOINT_TOL = 1e-12
_DEGENERATE = 1e-14


def source_coefficient(d) -> float:
    """2 pi^(d/2) / Gamma(d/2): the Gauss-law factor in d spatial dimensions."""
    if isinstance(d, bool) or not float(d).is_integer() or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    d = int(d)
    return 2.0 * math.pi ** (d / 2.0) / float(gamma(d / 2.0))


# =========================
# World Lines
# =========================
@dataclass(frozen=True, eq=False)
class Worldline1D:
    """
    Polyline of (ct, x) events with non-decreasing ct.

    strict=True requires every segment to be timelike (|dx| < d(ct)).
    strict=False admits the idealised instantaneous legs of a pair drawing.
    """

    points: np.ndarray
    strict: bool = True

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise GeometryError(f"world line needs at least two (ct, x) events, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise GeometryError("world line events must be finite")
        d = np.diff(pts, axis=0)
        if np.any(d[:, 0] < 0):
            raise GeometryError("world line runs backwards in time")
        if self.strict:
            bad = np.nonzero(np.abs(d[:, 1]) >= d[:, 0])[0]
            if len(bad):
                raise GeometryError(f"segment {int(bad[0])} of the world line is not timelike")
        object.__setattr__(self, "points", pts)

    @property
    def creation(self) -> np.ndarray:
        return self.points[0]

    @property
    def annihilation(self) -> np.ndarray:
        return self.points[-1]

    def position(self, ct: float) -> float:
        """x on the first segment with nonzero duration that contains ct."""
        pts = self.points
        for (t0, x0), (t1, x1) in zip(pts[:-1], pts[1:]):
            if t1 > t0 and t0 <= ct <= t1:
                return x0 + (ct - t0) / (t1 - t0) * (x1 - x0)
        raise GeometryError(f"ct = {ct} is outside the world line's lifetime")


def _ray_hit(t0, x0, t1, x1, ct, x, sign) -> Optional[tuple[float, float]]:
    """
    Where the segment meets the past light ray x_r + sign*ct_r = x + sign*ct.

    sign = -1 is the ray reaching the event from the left, +1 from the right.
    Returns the hit's (ct_r, x_r) as a tuple, or None.
    """
    dt, dx = t1 - t0, x1 - x0
    target = x + sign * ct
    den = dx + sign * dt
    if abs(den) > _DEGENERATE * max(1.0, abs(dt), abs(dx)):
        lam = (target - (x0 + sign * t0)) / den
        if not -ENDPOINT_TOL <= lam <= 1.0 + ENDPOINT_TOL:
            return None
        lam = min(max(lam, 0.0), 1.0)
    else:
        def g(lam):
            return (x0 + lam * dx) + sign * (t0 + lam * dt) - target

        g0, g1 = g(0.0), g(1.0)
        if g0 == 0.0:
            lam = 0.0
        elif g1 == 0.0:
            lam = 1.0
        elif g0 * g1 < 0:
            lam = brentq(g, 0.0, 1.0, xtol=BISECT_TOL)
        else:
            return None
    t_r = t0 + lam * dt
    if t_r > ct + ENDPOINT_TOL:
        return None
    return t_r, x0 + lam * dx


def _latest_hit(worldline: Worldline1D, ct: float, x: float, sign: int):
    best = None
    pts = worldline.points
    for (t0, x0), (t1, x1) in zip(pts[:-1], pts[1:]):
        hit = _ray_hit(t0, x0, t1, x1, ct, x, sign)
        if hit is not None and (best is None or hit[0] > best[0]):
            best = hit
    return best


def causal_field_1d(q: float, worldline: Worldline1D, t: float, x: float, *, c: float = 1.0) -> tuple[float, bool]:
    """
    Causal electric field of a point charge at the event (t, x).

    E = q theta(x - r+) - q theta(r- - x), where r+ (r-) is where the past
    light ray arriving from the left (right) last met the world line. A term
    is absent when its ray misses the line. Also returns whether the event
    lies in the causal future of the creation event.
    """
    ct = c * t
    t_c, x_c = worldline.creation
    in_future = ct - t_c >= abs(x - x_c)
    value = 0.0
    left = _latest_hit(worldline, ct, x, -1)
    if left is not None:
        value += q * float(step(x - left[1]))
    right = _latest_hit(worldline, ct, x, +1)
    if right is not None:
        value -= q * float(step(right[1] - x))
    return value, bool(in_future)


# =========================
# Pair Geometry
# =========================
def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _proper_crossing(p1, p2, p3, p4) -> bool:
    d1, d2 = _orient(p3, p4, p1), _orient(p3, p4, p2)
    d3, d4 = _orient(p1, p2, p3), _orient(p1, p2, p4)
    return d1 * d2 < 0 and d3 * d4 < 0


@dataclass(frozen=True, eq=False)
class PairGeometry:
    """Electron and positron world lines sharing creation and annihilation events."""

    electron: Worldline1D
    positron: Worldline1D

    def __post_init__(self):
        for label, a, b in (
            ("creation", self.electron.creation, self.positron.creation),
            ("annihilation", self.electron.annihilation, self.positron.annihilation),
        ):
            if not np.allclose(a, b, rtol=0.0, atol=1e-9):
                raise GeometryError(f"{label} events differ: {a.tolist()} vs {b.tolist()}")
        poly = self.polygon
        n = len(poly)
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                if _proper_crossing(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]):
                    raise GeometryError(f"pair polygon crosses itself (edges {i} and {j})")

    @property
    def polygon(self) -> np.ndarray:
        """Electron chain forward, then positron chain backward, without the repeated endpoints."""
        return np.vstack([self.electron.points, self.positron.points[-2:0:-1]])

    @property
    def area(self) -> float:
        """Enclosed (ct, x) area by the shoelace formula."""
        t, x = self.polygon[:, 0], self.polygon[:, 1]
        return 0.5 * abs(float(np.dot(t, np.roll(x, -1)) - np.dot(x, np.roll(t, -1))))

    @classmethod
    def rectangle(cls, cT: float, L: float) -> "PairGeometry":
        """
        Idealised pair created at the origin and annihilated at (cT, 0).

        The charges jump apart to x = +-L/2 at creation and back at annihilation,
        so both lines carry instantaneous legs and are built with strict=False.
        """
        if not cT > 0 or L < 0:
            raise GeometryError(f"rectangle pair needs cT > 0 and L >= 0, got cT={cT}, L={L}")
        h = 0.5 * L
        electron = Worldline1D(np.array([[0.0, 0.0], [0.0, h], [cT, h], [cT, 0.0]]), strict=False)
        positron = Worldline1D(np.array([[0.0, 0.0], [0.0, -h], [cT, -h], [cT, 0.0]]), strict=False)
        return cls(electron, positron)

    @classmethod
    def diamond(cls, cT: float, v: float = 0.5) -> "PairGeometry":
        """Timelike pair: both charges separate at speed v c, turn at cT/2 and meet again at cT."""
        if not cT > 0 or not 0 < v < 1:
            raise GeometryError(f"diamond pair needs cT > 0 and 0 < v < 1, got cT={cT}, v={v}")
        h = 0.5 * cT
        electron = Worldline1D(np.array([[0.0, 0.0], [h, v * h], [cT, 0.0]]))
        positron = Worldline1D(np.array([[0.0, 0.0], [h, -v * h], [cT, 0.0]]))
        return cls(electron, positron)


def pair_flux(pair: PairGeometry, e: float) -> float:
    """Flux 2 e A of a pair, A from the shoelace formula."""
    return 2.0 * e * pair.area


def pair_field(pair: PairGeometry, e: float, ct: float, x: float) -> float:
    """Superposed causal field of the electron (-e) and positron (+e) at the event (ct, x)."""
    electron, _ = causal_field_1d(-e, pair.electron, ct, x)
    positron, _ = causal_field_1d(e, pair.positron, ct, x)
    return electron + positron


def _vertices(pair: PairGeometry) -> np.ndarray:
    return np.unique(np.vstack([pair.electron.points, pair.positron.points]), axis=0)


def _front_positions(vertices: np.ndarray, ct: float) -> list[float]:
    """x where light fronts leaving the world-line vertices sit at time ct."""
    past = vertices[vertices[:, 0] < ct]
    return list(past[:, 1] - (ct - past[:, 0])) + list(past[:, 1] + (ct - past[:, 0]))


def _front_times(pair: PairGeometry, vertices: np.ndarray) -> list[float]:
    """ct where a light front from a vertex crosses either world line."""
    times = []
    for line in (pair.electron, pair.positron):
        pts = line.points
        for (t0, x0), (t1, x1) in zip(pts[:-1], pts[1:]):
            dt, dx = t1 - t0, x1 - x0
            if dt <= 0:
                continue
            for tv, xv in vertices:
                for sign in (-1.0, 1.0):
                    den = dx - sign * dt
                    if den == 0.0:
                        continue
                    lam = (xv + sign * (t0 - tv) - x0) / den
                    if 0.0 < lam < 1.0 and t0 + lam * dt > tv:
                        times.append(t0 + lam * dt)
    return times


def field_route_flux(
    pair: PairGeometry,
    e: float,
    *,
    tol: float = QUAD_TOL,
    order: int = QUAD_ORDER,
    max_depth: int = QUAD_MAX_DEPTH,
) -> float:
    """
    |int int E d(ct) dx| over the region between the two world lines.

    Iterated Gauss-Legendre with ct outermost. The field is piecewise constant
    between light fronts leaving the world-line vertices, so the inner
    integral is split at the fronts and the outer one at vertex times and at
    the times fronts cross the world lines.
    """
    rule = get_rule(order)
    inner_tol = tol * 1e-2
    vertices = _vertices(pair)

    def line(ct: float) -> float:
        xa, xb = pair.electron.position(ct), pair.positron.position(ct)
        lo, hi = min(xa, xb), max(xa, xb)
        if hi == lo:
            return 0.0

        def fn(xs):
            return np.array([pair_field(pair, e, ct, xv) for xv in xs])

        breaks = _front_positions(vertices, ct)
        return float(rule.integrate(fn, lo, hi, tol=inner_tol, max_depth=max_depth, breakpoints=breaks).value)

    def outer(cts):
        return np.array([line(float(ct)) for ct in cts])

    t0, t1 = float(vertices[:, 0].min()), float(vertices[:, 0].max())
    if t1 == t0:
        return 0.0
    breaks = list(vertices[:, 0]) + _front_times(pair, vertices)
    res = rule.integrate(outer, t0, t1, tol=tol, max_depth=max_depth, breakpoints=breaks)
    logger.debug("pair field route: %.17g over %d panels", res.value, res.panels)
    return abs(float(res.value))


# =========================
# Quantization
# =========================
def check_1d_quantization(
    area: float,
    alpha1: float,
    tolerance: float = PHASE_TOLERANCE,
) -> QuantizationReport:
    """alpha1 * A = pi n, checked as the phase 2 alpha1 A = 2 pi n."""
    if area < 0:
        raise ValueError(f"area must be non-negative, got {area}")
    if not alpha1 > 0:
        raise ValueError(f"alpha1 must be positive, got {alpha1}")
    return _report(2.0 * alpha1 * area, tolerance)


class Alpha1Estimate(NamedTuple):
    alpha_scale: float
    area_max: float
    compton_wavelength: float
    tau: float


def estimate_alpha1(m: float, constants: Constants = NATURAL) -> Alpha1Estimate:
    """
    Scale of the (1+1)D fine-structure constant from the largest pair area.

    The pair lifetime tau = hbar / (2 m c^2) saturates the time-energy
    uncertainty with Delta E = m c^2, so A_max = c^2 tau^2 / 2 = lambda_C^2 / 8
    and alpha_scale = pi / A_max. The prefactor 8 pi is a convention.
    """
    if not m > 0:
        raise ValueError(f"mass must be positive, got {m}")
    hbar, c = constants.hbar, constants.c
    compton = hbar / (m * c)
    tau = hbar / (2.0 * m * c * c)
    area_max = c * c * tau * tau / 2.0
    return Alpha1Estimate(math.pi / area_max, area_max, compton, tau)
