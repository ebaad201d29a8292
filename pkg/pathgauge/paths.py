"""
Parametrized path families y(s, x) with y(0, x) = x0 and y(1, x) = x.

Builtin families are chains of straight segments between affine waypoints
w_k(x) = a_k + M_k x, so both Jacobians are exact. Global s allocates equal
measure to every segment; quadrature always runs per segment in local s.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from pathgauge.config import (
    FD_MIN_STEP,
    FD_STEP,
    JUNCTION_TOL,
    R_FAR_FACTOR,
    STRING_CLEARANCE,
    WAYPOINT_CONTINUITY_TOL,
)
from pathgauge.errors import PathError
from pathgauge.spacetime import VectorLike, as_array

logger = logging.getLogger(__name__)

JACOBIAN_MODES = ("analytic", "finite-difference")


# =========================
# Waypoints and Segments
# =========================
@dataclass(frozen=True, eq=False)
class Waypoint:
    """Affine point a + M x of the evaluation point x."""

    offset: np.ndarray
    matrix: np.ndarray

    @classmethod
    def fixed(cls, p: VectorLike) -> "Waypoint":
        return cls(as_array(p).astype(float), np.zeros((4, 4)))

    @classmethod
    def target(cls) -> "Waypoint":
        return cls(np.zeros(4), np.eye(4))

    @classmethod
    def select(cls, diagonal: Sequence[float], offset: VectorLike = (0.0, 0.0, 0.0, 0.0)) -> "Waypoint":
        """Waypoint offset + diag(diagonal) x, e.g. (0, x, 0, -z) is select((0, 1, 0, -1))."""
        return cls(as_array(offset).astype(float), np.diag(np.asarray(diagonal, dtype=float)))

    def at(self, x: np.ndarray) -> np.ndarray:
        return self.offset + self.matrix @ x


class SegmentSpec(ABC):
    """One piece of a path family, parametrized by local s in [0, 1]."""

    @abstractmethod
    def point(self, s: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Points of shape (M, 4) for local parameters s of shape (M,)."""

    def dyds(self, s: np.ndarray, x: np.ndarray) -> Optional[np.ndarray]:
        """Analytic dy/ds (M, 4), or None to use finite differences."""
        return None

    def dydx(self, s: np.ndarray, x: np.ndarray) -> Optional[np.ndarray]:
        """Analytic dy^lambda/dx^mu (M, 4, 4) indexed [m, lambda, mu], or None."""
        return None


class LinearSegment(SegmentSpec):
    """Straight segment between two affine waypoints."""

    def __init__(self, start: Waypoint, end: Waypoint):
        self.start = start
        self.end = end

    def point(self, s, x):
        s = np.asarray(s, dtype=float)[:, None]
        return (1.0 - s) * self.start.at(x) + s * self.end.at(x)

    def dyds(self, s, x):
        return np.broadcast_to(self.end.at(x) - self.start.at(x), (len(s), 4)).copy()

    def dydx(self, s, x):
        s = np.asarray(s, dtype=float)[:, None, None]
        return (1.0 - s) * self.start.matrix + s * self.end.matrix


class ReversedSegment(SegmentSpec):
    """The base segment traversed from its end to its start."""

    def __init__(self, base: SegmentSpec):
        self.base = base

    def point(self, s, x):
        return self.base.point(1.0 - np.asarray(s), x)

    def dyds(self, s, x):
        d = self.base.dyds(1.0 - np.asarray(s), x)
        return None if d is None else -d

    def dydx(self, s, x):
        return self.base.dydx(1.0 - np.asarray(s), x)


class ReparametrizedSegment(SegmentSpec):
    """The base segment under a smooth monotone map phi: [0, 1] -> [0, 1]."""

    def __init__(self, base: SegmentSpec, phi: Callable, dphi: Callable):
        self.base = base
        self.phi = phi
        self.dphi = dphi

    def point(self, s, x):
        return self.base.point(self.phi(np.asarray(s)), x)

    def dyds(self, s, x):
        s = np.asarray(s)
        d = self.base.dyds(self.phi(s), x)
        return None if d is None else d * self.dphi(s)[:, None]

    def dydx(self, s, x):
        return self.base.dydx(self.phi(np.asarray(s)), x)


# =========================
# Path Families
# =========================
def _richardson(fn: Callable[[float], np.ndarray], h: float) -> np.ndarray:
    """Central difference of fn at 0 with one Richardson extrapolation step."""
    d_h = (fn(h) - fn(-h)) / (2.0 * h)
    d_h2 = (fn(0.5 * h) - fn(-0.5 * h)) / h
    return (4.0 * d_h2 - d_h) / 3.0


@dataclass(frozen=True, eq=False)
class PathFamily:
    """
    A family of paths from x0 to the evaluation point x.

    `clearance` optionally vets the evaluation point (for example the Dirac
    string check of the monopole paths) and raises PathError.
    """

    segments: tuple[SegmentSpec, ...]
    x0: np.ndarray
    jacobian_mode: str = "analytic"
    name: str = "path"
    clearance: Optional[Callable[[np.ndarray], None]] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.segments:
            raise PathError(f"path '{self.name}' has no segments")
        if self.jacobian_mode not in JACOBIAN_MODES:
            raise PathError(f"unknown jacobian_mode '{self.jacobian_mode}'")
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "x0", as_array(self.x0).astype(float))

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    def with_mode(self, mode: str) -> "PathFamily":
        return PathFamily(self.segments, self.x0, mode, self.name, self.clearance, self.params)

    def check_clearance(self, x: VectorLike) -> None:
        if self.clearance is not None:
            self.clearance(as_array(x))

    def locate(self, s: float) -> tuple[int, float]:
        """Segment index and local parameter for a global s; junctions are rejected."""
        if not 0.0 <= s <= 1.0:
            raise PathError(f"s = {s} outside [0, 1]")
        K = self.n_segments
        t = s * K
        nearest = round(t)
        if 0 < nearest < K and abs(t - nearest) < JUNCTION_TOL * K:
            raise PathError(f"s = {s} is a segment junction of '{self.name}'; split the integral there")
        k = min(int(np.floor(t)), K - 1)
        return k, t - k

    # ---- per-segment evaluation (local s) ----
    def segment_jacobians(self, k: int, s: np.ndarray, x: np.ndarray):
        """(dy/ds, dy/dx) of segment k at local parameters s."""
        seg = self.segments[k]
        s = np.asarray(s, dtype=float)
        dyds = dydx = None
        if self.jacobian_mode == "analytic":
            dyds = seg.dyds(s, x)
            dydx = seg.dydx(s, x)
        if dyds is None:
            dyds = _richardson(lambda h: seg.point(s + h, x), FD_STEP)
        if dydx is None:
            dydx = np.empty((len(s), 4, 4))
            for mu in range(4):
                h = FD_STEP * max(1.0, abs(x[mu]))
                if h < FD_MIN_STEP or x[mu] + h == x[mu]:
                    raise PathError(f"finite-difference step underflow at x[{mu}] = {x[mu]}")
                e = np.zeros(4)
                e[mu] = 1.0
                dydx[:, :, mu] = _richardson(lambda dh: seg.point(s, x + dh * e), h)
        return dyds, dydx

    # ---- global evaluation ----
    def point(self, s: float, x: VectorLike) -> np.ndarray:
        if not 0.0 <= s <= 1.0:
            raise PathError(f"s = {s} outside [0, 1]")
        pts, _, _ = self.evaluate(np.array([s]), x)
        return pts[0]

    def jacobians(self, s: float, x: VectorLike) -> tuple[np.ndarray, np.ndarray]:
        """Global dy/ds and dy^lambda/dx^mu at s; s must not sit on a junction."""
        x = as_array(x)
        k, local = self.locate(s)
        dyds, dydx = self.segment_jacobians(k, np.array([local]), x)
        return dyds[0] * self.n_segments, dydx[0]

    def evaluate(self, s: np.ndarray, x: VectorLike):
        """
        Vectorised global evaluation: points, global dy/ds and dy/dx.

        Points exactly on a junction are assigned to the earlier segment.
        """
        x = as_array(x)
        s = np.asarray(s, dtype=float)
        K = self.n_segments
        k = np.clip(np.ceil(s * K) - 1, 0, K - 1).astype(int)
        local = s * K - k
        pts = np.empty((len(s), 4))
        dyds = np.empty((len(s), 4))
        dydx = np.empty((len(s), 4, 4))
        for idx in np.unique(k):
            mask = k == idx
            pts[mask] = self.segments[idx].point(local[mask], x)
            d_s, d_x = self.segment_jacobians(idx, local[mask], x)
            dyds[mask] = d_s * K
            dydx[mask] = d_x
        return pts, dyds, dydx

    @property
    def junctions(self) -> list[float]:
        K = self.n_segments
        return [k / K for k in range(1, K)]

    def validate(self, sample_points: Sequence[VectorLike], tol: float = WAYPOINT_CONTINUITY_TOL) -> None:
        """Check boundary conditions and continuity at sample points; raise PathError on failure."""
        for x in sample_points:
            x = as_array(x)
            start = self.segments[0].point(np.array([0.0]), x)[0]
            end = self.segments[-1].point(np.array([1.0]), x)[0]
            if not np.allclose(start, self.x0, rtol=0.0, atol=tol):
                raise PathError(f"'{self.name}': y(0, x) = {start} differs from x0 = {self.x0}")
            if not np.allclose(end, x, rtol=0.0, atol=tol):
                raise PathError(f"'{self.name}': y(1, x) = {end} differs from x = {x}")
            for k in range(self.n_segments - 1):
                a = self.segments[k].point(np.array([1.0]), x)[0]
                b = self.segments[k + 1].point(np.array([0.0]), x)[0]
                gap = float(np.max(np.abs(a - b)))
                if gap > tol:
                    raise PathError(f"'{self.name}': gap {gap:.3g} at junction {k + 1}")


def waypoint_chain(waypoints: Sequence[Waypoint], name: str, **kwargs) -> PathFamily:
    """Path through affine waypoints; the first must be fixed (x0), the last is the target."""
    if len(waypoints) < 2:
        raise PathError(f"'{name}' needs at least two waypoints")
    first = waypoints[0]
    if np.any(first.matrix):
        raise PathError(f"'{name}': the starting waypoint must not depend on x")
    segments = tuple(LinearSegment(a, b) for a, b in zip(waypoints[:-1], waypoints[1:]))
    return PathFamily(segments, first.offset, name=name, **kwargs)


def waypoint_path(points: Sequence[VectorLike], name: str = "waypoints") -> PathFamily:
    """User path: fixed four-vectors (the first is x0) followed by the evaluation point."""
    if len(points) < 1:
        raise PathError("waypoint path needs at least a starting point")
    chain = [Waypoint.fixed(p) for p in points] + [Waypoint.target()]
    return waypoint_chain(chain, name)


def reparametrized(path: PathFamily, k: int, phi: Callable, dphi: Callable) -> PathFamily:
    """Apply a smooth monotone map of [0, 1] to segment k."""
    segs = list(path.segments)
    segs[k] = ReparametrizedSegment(segs[k], phi, dphi)
    return PathFamily(tuple(segs), path.x0, path.jacobian_mode, f"{path.name}~", path.clearance, path.params)


def reversed_segments(path: PathFamily) -> tuple[SegmentSpec, ...]:
    return tuple(ReversedSegment(seg) for seg in reversed(path.segments))


# =========================
# Builtin Families
# =========================
def _string_clearance(x: np.ndarray) -> None:
    r = float(np.linalg.norm(x[1:]))
    rho = float(np.hypot(x[1], x[2]))
    if rho < STRING_CLEARANCE * r or r == 0.0:
        raise PathError(
            f"evaluation point {x.tolist()} is within {STRING_CLEARANCE:g} r of the z axis (Dirac string)"
        )


def velocity_path(**_) -> PathFamily:
    """(0, s x) then (s ct, x)."""
    return waypoint_chain(
        [Waypoint.fixed(np.zeros(4)), Waypoint.select((0, 1, 1, 1)), Waypoint.target()], "velocity"
    )


def length_path(**_) -> PathFamily:
    """(s ct, 0) then (ct, s x)."""
    return waypoint_chain(
        [Waypoint.fixed(np.zeros(4)), Waypoint.select((1, 0, 0, 0)), Waypoint.target()], "length"
    )


def straight_line_path(x0: VectorLike = (0.0, 0.0, 0.0, 0.0), **_) -> PathFamily:
    """y = x0 + s (x - x0)."""
    return waypoint_chain([Waypoint.fixed(x0), Waypoint.target()], "straight_line")


def _far(params: dict) -> float:
    return float(params.get("r_far", R_FAR_FACTOR * params.get("scale", 1.0)))


def monopole_north_path(**params) -> PathFamily:
    """x0 -> (0,0,-z) -> (x,0,-z) -> (x,0,z) -> (0,0,z) -> x, with x0 = (R, 0, -R)."""
    R = _far(params)
    chain = [
        Waypoint.fixed((0.0, R, 0.0, -R)),
        Waypoint.select((0, 0, 0, -1)),
        Waypoint.select((0, 1, 0, -1)),
        Waypoint.select((0, 1, 0, 1)),
        Waypoint.select((0, 0, 0, 1)),
        Waypoint.target(),
    ]
    return waypoint_chain(chain, "monopole_north", clearance=_string_clearance, params={"r_far": R})


def monopole_south_path(**params) -> PathFamily:
    """x0 -> (0,0,-z) -> (x,y,-z) -> x."""
    R = _far(params)
    chain = [
        Waypoint.fixed((0.0, R, 0.0, -R)),
        Waypoint.select((0, 0, 0, -1)),
        Waypoint.select((0, 1, 1, -1)),
        Waypoint.target(),
    ]
    return waypoint_chain(chain, "monopole_south", clearance=_string_clearance, params={"r_far": R})


def monopole_full_path(**params) -> PathFamily:
    """x0 -> (0,0,-z) -> (x,y,-z) -> (x,y,z) -> (0,0,z) -> x."""
    R = _far(params)
    chain = [
        Waypoint.fixed((0.0, R, 0.0, -R)),
        Waypoint.select((0, 0, 0, -1)),
        Waypoint.select((0, 1, 1, -1)),
        Waypoint.select((0, 1, 1, 1)),
        Waypoint.select((0, 0, 0, 1)),
        Waypoint.target(),
    ]
    return waypoint_chain(chain, "monopole_full", clearance=_string_clearance, params={"r_far": R})


def disk_p1_path(**params) -> PathFamily:
    """x0 = (R, 0, 0) -> (x, 0, 0) -> origin -> x."""
    R = _far(params)
    chain = [
        Waypoint.fixed((0.0, R, 0.0, 0.0)),
        Waypoint.select((0, 1, 0, 0)),
        Waypoint.fixed(np.zeros(4)),
        Waypoint.target(),
    ]
    return waypoint_chain(chain, "disk_p1", params={"r_far": R})


def disk_p2_path(**params) -> PathFamily:
    """x0 -> (x,0) -> (x,y) -> (-x,y) -> (-x,-y) -> (x,-y) -> (x,0) -> origin -> x."""
    R = _far(params)
    chain = [
        Waypoint.fixed((0.0, R, 0.0, 0.0)),
        Waypoint.select((0, 1, 0, 0)),
        Waypoint.select((0, 1, 1, 0)),
        Waypoint.select((0, -1, 1, 0)),
        Waypoint.select((0, -1, -1, 0)),
        Waypoint.select((0, 1, -1, 0)),
        Waypoint.select((0, 1, 0, 0)),
        Waypoint.fixed(np.zeros(4)),
        Waypoint.target(),
    ]
    return waypoint_chain(chain, "disk_p2", params={"r_far": R})


def eblock_p1_path(**_) -> PathFamily:
    """Straight line from the origin."""
    return waypoint_chain([Waypoint.fixed(np.zeros(4)), Waypoint.target()], "eblock_p1")


def eblock_p2_path(dt: float = 1.0, dx: float = 1.0, c: float = 1.0, margin: Optional[float] = None, **_) -> PathFamily:
    """Origin -> clockwise (ct, x) rectangle around the block -> origin -> x."""
    cdt = c * dt
    m = 0.25 * min(cdt, dx) if margin is None else margin
    corners = [(-m, -m), (-m, dx + m), (cdt + m, dx + m), (cdt + m, -m), (-m, -m)]
    chain = [Waypoint.fixed(np.zeros(4))]
    chain += [Waypoint.fixed((ct, xx, 0.0, 0.0)) for ct, xx in corners]
    chain += [Waypoint.fixed(np.zeros(4)), Waypoint.target()]
    return waypoint_chain(chain, "eblock_p2", params={"dt": dt, "dx": dx, "c": c, "margin": m})


BUILTIN_PATHS: dict[str, Callable[..., PathFamily]] = {
    "velocity": velocity_path,
    "length": length_path,
    "straight_line": straight_line_path,
    "monopole_north": monopole_north_path,
    "monopole_south": monopole_south_path,
    "monopole_full": monopole_full_path,
    "disk_p1": disk_p1_path,
    "disk_p2": disk_p2_path,
    "eblock_p1": eblock_p1_path,
    "eblock_p2": eblock_p2_path,
}


def builtin_path(name: str, **params) -> PathFamily:
    """Named path family; params such as r_far, dt, dx, c or margin go to the builder."""
    try:
        builder = BUILTIN_PATHS[name]
    except KeyError:
        raise PathError(f"unknown builtin path '{name}' (choose from {', '.join(BUILTIN_PATHS)})") from None
    return builder(**params)


# =========================
# Loops
# =========================
@dataclass(frozen=True, eq=False)
class LoopSpec:
    """The closed loop path_a - path_b (path_a forward, then path_b reversed), wound N times."""

    path_a: PathFamily
    path_b: PathFamily
    winding: int = 1

    def __post_init__(self):
        if int(self.winding) != self.winding or self.winding < 1:
            raise ValueError(f"winding must be a positive integer, got {self.winding}")
        if not np.allclose(self.path_a.x0, self.path_b.x0, rtol=0.0, atol=WAYPOINT_CONTINUITY_TOL):
            raise PathError(
                f"loop endpoints differ: '{self.path_a.name}' starts at {self.path_a.x0.tolist()}, "
                f"'{self.path_b.name}' at {self.path_b.x0.tolist()}"
            )


def concatenate_winding(loop: LoopSpec) -> PathFamily:
    """path_b followed by N traversals of (path_a reversed, then path_b)."""
    a, b = loop.path_a, loop.path_b
    lap = reversed_segments(a) + b.segments
    segments = b.segments + lap * loop.winding
    return PathFamily(
        segments,
        b.x0,
        b.jacobian_mode,
        f"{b.name}+{loop.winding}x({a.name}-{b.name})",
    )


@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """A loop evaluated at a fixed x, parametrized by t in [0, 1] with equal measure per piece."""

    segments: tuple[SegmentSpec, ...]
    x: np.ndarray

    @property
    def breaks(self) -> list[float]:
        K = len(self.segments)
        return [k / K for k in range(1, K)]

    def _split(self, t: np.ndarray):
        K = len(self.segments)
        t = np.asarray(t, dtype=float)
        k = np.clip(np.ceil(t * K) - 1, 0, K - 1).astype(int)
        return K, k, t * K - k

    def point(self, t: np.ndarray) -> np.ndarray:
        K, k, local = self._split(t)
        out = np.empty((len(k), 4))
        for idx in np.unique(k):
            mask = k == idx
            out[mask] = self.segments[idx].point(local[mask], self.x)
        return out

    def tangent(self, t: np.ndarray) -> np.ndarray:
        K, k, local = self._split(t)
        out = np.empty((len(k), 4))
        for idx in np.unique(k):
            mask = k == idx
            seg = self.segments[idx]
            d = seg.dyds(local[mask], self.x)
            if d is None:
                d = _richardson(lambda h: seg.point(local[mask] + h, self.x), FD_STEP)
            out[mask] = d * K
        return out


def loop_curve(loop: LoopSpec, x: VectorLike) -> ClosedCurve:
    """One traversal of path_a then path_b reversed at the evaluation point x."""
    return ClosedCurve(loop.path_a.segments + reversed_segments(loop.path_b), as_array(x))
