"""
Closed-form potentials A^mu(x) (contravariant) for the worked configurations.

Each builder returns a callable mapping points of shape (4,) or (N, 4) to
potentials of the same shape. These are the reference answers the quadrature
engine is compared against, and the background potentials used for loop fluxes.
"""

from __future__ import annotations

from functools import wraps
from typing import Callable

import numpy as np

from pathgauge.spacetime import as_array, lower

Potential = Callable[[np.ndarray], np.ndarray]


def _pointwise(fn: Callable[[np.ndarray], np.ndarray]) -> Potential:
    @wraps(fn)
    def wrapper(x):
        pts = as_array(x)
        single = pts.ndim == 1
        out = fn(np.atleast_2d(pts))
        return out[0] if single else out

    return wrapper


# =========================
# Uniform Fields
# =========================
def velocity_gauge(E0) -> Potential:
    """A^mu = (0, -ct E0)."""
    E = np.asarray(E0, dtype=float)

    @_pointwise
    def A(x):
        out = np.zeros_like(x)
        out[:, 1:] = -x[:, :1] * E
        return out

    return A


def length_gauge(E0) -> Potential:
    """A^mu = (-x . E0, 0)."""
    E = np.asarray(E0, dtype=float)

    @_pointwise
    def A(x):
        out = np.zeros_like(x)
        out[:, 0] = -x[:, 1:] @ E
        return out

    return A


def fock_schwinger_gauge(E0=(0.0, 0.0, 0.0), B0=(0.0, 0.0, 0.0)) -> Potential:
    """A^mu = (-x . E0 / 2, -ct E0 / 2 + B0 x x / 2); satisfies x_mu A^mu = 0."""
    E = np.asarray(E0, dtype=float)
    B = np.asarray(B0, dtype=float)

    @_pointwise
    def A(x):
        out = np.zeros_like(x)
        out[:, 0] = -0.5 * (x[:, 1:] @ E)
        out[:, 1:] = -0.5 * x[:, :1] * E + 0.5 * np.cross(B, x[:, 1:])
        return out

    return A


def symmetric_gauge(B0) -> Potential:
    """A = B0 x x / 2."""
    return fock_schwinger_gauge(B0=B0)


# =========================
# Monopole
# =========================
def monopole_north_potential(g: float) -> Potential:
    """A = g (1 - z/r) / rho^2 (-y, x, 0); regular on +z, string along -z."""

    @_pointwise
    def A(x):
        X, Y, Z = x[:, 1], x[:, 2], x[:, 3]
        r = np.sqrt(X**2 + Y**2 + Z**2)
        k = g * (1.0 - Z / r) / (X**2 + Y**2)
        out = np.zeros_like(x)
        out[:, 1], out[:, 2] = -k * Y, k * X
        return out

    return A


def monopole_south_potential(g: float) -> Potential:
    """A = g (1 + z/r) / rho^2 (y, -x, 0); regular on -z, string along +z."""

    @_pointwise
    def A(x):
        X, Y, Z = x[:, 1], x[:, 2], x[:, 3]
        r = np.sqrt(X**2 + Y**2 + Z**2)
        k = g * (1.0 + Z / r) / (X**2 + Y**2)
        out = np.zeros_like(x)
        out[:, 1], out[:, 2] = k * Y, -k * X
        return out

    return A


# Dirac potential with its string along the negative z axis.
dirac_potential = monopole_north_potential


def azimuth(x) -> np.ndarray:
    """Azimuthal angle phi in (-pi, pi]."""
    pts = np.atleast_2d(as_array(x))
    return np.arctan2(pts[:, 2], pts[:, 1])


# =========================
# Confined Fields
# =========================
def disk_potential(B0: float, r0: float) -> Potential:
    """B0 (-y, x, 0)/2 inside the disk, B0 r0^2 (-y, x, 0) / (2 rho^2) outside."""

    @_pointwise
    def A(x):
        X, Y = x[:, 1], x[:, 2]
        rho2 = X**2 + Y**2
        inside = rho2 <= r0**2
        k = np.where(inside, 0.5 * B0, 0.5 * B0 * r0**2 / np.where(inside, 1.0, rho2))
        out = np.zeros_like(x)
        out[:, 1], out[:, 2] = -k * Y, k * X
        return out

    return A


def eblock_potential(E0: float, dt: float, dx: float, c: float = 1.0) -> Potential:
    """
    Straight-line potential of the confined electric block.

    A^mu = -E0 s_max^2 (x, ct, 0, 0) / 2 with s_max = min(1, dx/x, c dt/ct) for
    x, ct > 0 and zero otherwise. Inside the block this is the Fock-Schwinger
    form; beyond one edge it reduces to the other two quoted regions.
    """
    cdt = c * dt

    @_pointwise
    def A(x):
        ct, X = x[:, 0], x[:, 1]
        live = (ct > 0) & (X > 0)
        safe_x = np.where(live, X, 1.0)
        safe_t = np.where(live, ct, 1.0)
        s_max = np.where(live, np.minimum(1.0, np.minimum(dx / safe_x, cdt / safe_t)), 0.0)
        out = np.zeros_like(x)
        out[:, 0] = -0.5 * E0 * s_max**2 * X
        out[:, 1] = -0.5 * E0 * s_max**2 * ct
        return out

    return A


def lowered(potential: Potential) -> Potential:
    """Covariant components A_mu of a contravariant closed form."""

    def A(x):
        return lower(potential(x))

    return A


def difference(first: Potential, second: Potential) -> Potential:
    def A(x):
        return first(x) - second(x)

    return A


# Registry used by scenario configs; builders take field parameters by keyword.
CLOSED_FORMS: dict[str, Callable[..., Potential]] = {
    "velocity": lambda E0, **_: velocity_gauge(E0),
    "length": lambda E0, **_: length_gauge(E0),
    "fock_schwinger": lambda E0=(0.0, 0.0, 0.0), B0=(0.0, 0.0, 0.0), **_: fock_schwinger_gauge(E0, B0),
    "monopole_north": lambda g, **_: monopole_north_potential(g),
    "monopole_south": lambda g, **_: monopole_south_potential(g),
    "disk": lambda B0, r0, **_: disk_potential(B0, r0),
    "eblock": lambda E0, dt, dx, c=1.0, **_: eblock_potential(E0, dt, dx, c),
}


def closed_form(name: str, **params) -> Potential:
    try:
        builder = CLOSED_FORMS[name]
    except KeyError:
        raise ValueError(f"unknown closed form '{name}' (choose from {', '.join(CLOSED_FORMS)})") from None
    return builder(**params)
