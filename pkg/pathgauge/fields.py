"""
Field-strength tensor configurations F_{mu nu}(x).

Every configuration is built from E and B arrays through field_tensor(), so
antisymmetry holds exactly. Tensors are covariant:
F_{0i} = E^i, F_{i0} = -E^i and F_{ij} = -eps_{ijk} B^k.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from pathgauge.config import R_FAR_FACTOR, SINGULAR_GUARD
from pathgauge.errors import SingularityError
from pathgauge.spacetime import METRIC_DIAG, VectorLike, as_array

logger = logging.getLogger(__name__)

TensorFn = Callable[[np.ndarray], np.ndarray]
SurfaceFn = Callable[[np.ndarray], np.ndarray]


def step(v):
    """Heaviside step with theta(0) = 1/2."""
    return np.heaviside(v, 0.5)


def field_tensor(E: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Assemble covariant F_{mu nu} from E and B arrays of shape (N, 3)."""
    E = np.atleast_2d(E)
    B = np.atleast_2d(B)
    n = max(len(E), len(B))
    F = np.zeros((n, 4, 4))
    F[:, 0, 1:] = E
    F[:, 1:, 0] = -E
    F[:, 1, 2], F[:, 2, 1] = -B[:, 2], B[:, 2]
    F[:, 2, 3], F[:, 3, 2] = -B[:, 0], B[:, 0]
    F[:, 3, 1], F[:, 1, 3] = -B[:, 1], B[:, 1]
    return F


@dataclass(frozen=True)
class SingularLocus:
    """A set where F blows up, described by a distance function."""

    name: str
    distance: Callable[[np.ndarray], np.ndarray]
    radius: float = SINGULAR_GUARD


@dataclass(frozen=True, eq=False)
class FieldConfig:
    """
    A field configuration.

    `f` maps points of shape (N, 4) to covariant tensors of shape (N, 4, 4).
    `discontinuities` are implicit functions d(x) whose zero sets carry jumps.
    """

    name: str
    f: TensorFn
    reference_point: np.ndarray
    discontinuities: tuple[SurfaceFn, ...] = ()
    singular_loci: tuple[SingularLocus, ...] = ()
    confined: bool = False
    params: dict = field(default_factory=dict)

    def check_singular(self, points: VectorLike) -> None:
        """Raise SingularityError if any point lies inside a guard zone."""
        pts = np.atleast_2d(as_array(points))
        for locus in self.singular_loci:
            dist = locus.distance(pts)
            if np.any(dist < locus.radius):
                raise SingularityError(
                    f"{self.name}: evaluation within {locus.radius:g} of {locus.name} "
                    f"(closest distance {float(np.min(dist)):.3g})"
                )

    def evaluate(self, x: VectorLike) -> np.ndarray:
        """F_{mu nu} at one point (4, 4) or at many points (N, 4, 4)."""
        pts = as_array(x)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        self.check_singular(pts)
        F = self.f(pts)
        return F[0] if single else F

    __call__ = evaluate

    def upper(self, x: VectorLike) -> np.ndarray:
        """Contravariant F^{mu nu}."""
        return self.evaluate(x) * np.multiply.outer(METRIC_DIAG, METRIC_DIAG)

    def electric(self, x: VectorLike) -> np.ndarray:
        return self.evaluate(x)[..., 0, 1:]

    def magnetic(self, x: VectorLike) -> np.ndarray:
        F = self.evaluate(x)
        return np.stack([-F[..., 2, 3], -F[..., 3, 1], -F[..., 1, 2]], axis=-1)


# =========================
# Uniform Fields
# =========================
def _vector3(v, label: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"{label} must be a finite 3-vector, got {v!r}")
    return arr


def uniform_field(E0=(0.0, 0.0, 0.0), B0=(0.0, 0.0, 0.0)) -> FieldConfig:
    """Constant, uniform E0 and B0. The reference point is the origin by convention."""
    E = _vector3(E0, "E0")
    B = _vector3(B0, "B0")
    F0 = field_tensor(E, B)[0]

    def f(pts: np.ndarray) -> np.ndarray:
        return np.broadcast_to(F0, (len(pts), 4, 4)).copy()

    return FieldConfig(
        name="uniform",
        f=f,
        reference_point=np.zeros(4),
        params={"E0": E.tolist(), "B0": B.tolist()},
    )


def uniform_electric(E0) -> FieldConfig:
    """Constant, uniform electric field."""
    return uniform_field(E0=E0)


def uniform_magnetic(B0) -> FieldConfig:
    """Constant, uniform magnetic field."""
    return uniform_field(B0=B0)


def zero_field() -> FieldConfig:
    return uniform_field()


# =========================
# Monopole
# =========================
def monopole(g: float, r_far: Optional[float] = None) -> FieldConfig:
    """
    Magnetic monopole of charge g at the spatial origin, B = g r_hat / r^2.

    The reference point is the truncated far point (0, R, 0, -R) used by the
    monopole paths; the field only vanishes there asymptotically.
    """
    if g == 0 or not np.isfinite(g):
        raise ValueError(f"monopole charge must be nonzero and finite, got {g}")
    r_far = R_FAR_FACTOR if r_far is None else r_far

    def f(pts: np.ndarray) -> np.ndarray:
        r_vec = pts[:, 1:]
        r = np.linalg.norm(r_vec, axis=1)
        B = g * r_vec / r[:, None] ** 3
        return field_tensor(np.zeros_like(B), B)

    origin = SingularLocus("monopole at r = 0", lambda pts: np.linalg.norm(pts[:, 1:], axis=1))
    return FieldConfig(
        name="monopole",
        f=f,
        reference_point=np.array([0.0, r_far, 0.0, -r_far]),
        singular_loci=(origin,),
        params={"g": float(g), "r_far": float(r_far)},
    )


# =========================
# Confined Fields
# =========================
def confined_magnetic_disk(B0: float, r0: float, r_far: Optional[float] = None) -> FieldConfig:
    """B = B0 z_hat inside the cylinder sqrt(x^2 + y^2) <= r0, zero outside."""
    if B0 == 0 or not np.isfinite(B0):
        raise ValueError(f"B0 must be nonzero and finite, got {B0}")
    if not r0 > 0:
        raise ValueError(f"r0 must be positive, got {r0}")
    r_far = R_FAR_FACTOR * r0 if r_far is None else r_far

    def rho_minus_r0(pts: np.ndarray) -> np.ndarray:
        return np.hypot(pts[:, 1], pts[:, 2]) - r0

    def f(pts: np.ndarray) -> np.ndarray:
        B = np.zeros((len(pts), 3))
        B[:, 2] = B0 * (1.0 - step(rho_minus_r0(pts)))
        return field_tensor(np.zeros_like(B), B)

    return FieldConfig(
        name="magnetic_disk",
        f=f,
        reference_point=np.array([0.0, r_far, 0.0, 0.0]),
        discontinuities=(rho_minus_r0,),
        confined=True,
        params={"B0": float(B0), "r0": float(r0), "r_far": float(r_far)},
    )


def confined_electric_block(E0: float, dt: float, dx: float, c: float = 1.0) -> FieldConfig:
    """E = E0 x_hat on 0 <= ct <= c dt, 0 <= x <= dx; zero elsewhere."""
    if E0 == 0 or not np.isfinite(E0):
        raise ValueError(f"E0 must be nonzero and finite, got {E0}")
    if not (dt > 0 and dx > 0 and c > 0):
        raise ValueError(f"dt, dx and c must be positive, got dt={dt}, dx={dx}, c={c}")
    cdt = c * dt

    walls = (
        lambda pts: pts[:, 0],
        lambda pts: pts[:, 0] - cdt,
        lambda pts: pts[:, 1],
        lambda pts: pts[:, 1] - dx,
    )

    def f(pts: np.ndarray) -> np.ndarray:
        window = (step(pts[:, 0]) - step(pts[:, 0] - cdt)) * (step(pts[:, 1]) - step(pts[:, 1] - dx))
        E = np.zeros((len(pts), 3))
        E[:, 0] = E0 * window
        return field_tensor(E, np.zeros_like(E))

    return FieldConfig(
        name="electric_block",
        f=f,
        reference_point=np.zeros(4),
        discontinuities=walls,
        confined=True,
        params={"E0": float(E0), "dt": float(dt), "dx": float(dx), "c": float(c)},
    )


# =========================
# Tabulated Fields
# =========================
def tabulated_field(
    axes: Sequence[Sequence[float]],
    values: np.ndarray,
    reference_point: VectorLike = (0.0, 0.0, 0.0, 0.0),
) -> FieldConfig:
    """
    Field sampled on a regular (ct, x, y, z) grid, linearly interpolated.

    Args:
        axes: four increasing coordinate arrays
        values: array of shape (n0, n1, n2, n3, 6) holding (Ex, Ey, Ez, Bx, By, Bz)
        reference_point: x0 for path families built against this field

    Returns:
        A confined FieldConfig that is zero outside the grid.
    """
    grid = tuple(np.asarray(ax, dtype=float) for ax in axes)
    vals = np.asarray(values, dtype=float)
    if len(grid) != 4:
        raise ValueError(f"tabulated field needs 4 axes, got {len(grid)}")
    if any(len(ax) < 2 for ax in grid):
        raise ValueError("every tabulated axis needs at least two samples")
    if vals.shape != tuple(len(ax) for ax in grid) + (6,):
        raise ValueError(f"values shape {vals.shape} does not match axes")
    interp = RegularGridInterpolator(grid, vals, bounds_error=False, fill_value=0.0)

    def f(pts: np.ndarray) -> np.ndarray:
        sampled = interp(pts)
        return field_tensor(sampled[:, :3], sampled[:, 3:])

    walls = tuple(
        (lambda pts, k=k, v=v: pts[:, k] - v)
        for k, ax in enumerate(grid)
        for v in (ax[0], ax[-1])
    )
    return FieldConfig(
        name="tabulated",
        f=f,
        reference_point=as_array(reference_point),
        discontinuities=walls,
        confined=True,
        params={"shape": list(vals.shape[:4])},
    )


def load_tabulated(path) -> FieldConfig:
    """Load a tabulated field from an .npz file with arrays ct, x, y, z and values."""
    with np.load(path) as data:
        axes = [data[k] for k in ("ct", "x", "y", "z")]
        ref = data["reference_point"] if "reference_point" in data else np.zeros(4)
        return tabulated_field(axes, data["values"], ref)
