"""
Spacetime points, the Minkowski metric and physical constants.

Conventions: x^mu = (ct, x, y, z) and g = diag(+1, -1, -1, -1). Vectors are
stored with contravariant components; covariant views are produced on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

METRIC_DIAG = np.array([1.0, -1.0, -1.0, -1.0])
METRIC = np.diag(METRIC_DIAG)

# eps[i, j, k] for spatial indices 0..2
LEVI_CIVITA = np.zeros((3, 3, 3))
LEVI_CIVITA[0, 1, 2] = LEVI_CIVITA[1, 2, 0] = LEVI_CIVITA[2, 0, 1] = 1.0
LEVI_CIVITA[0, 2, 1] = LEVI_CIVITA[2, 1, 0] = LEVI_CIVITA[1, 0, 2] = -1.0


# =========================
# Four-vectors
# =========================
@dataclass(frozen=True)
class FourVector:
    """Contravariant four-vector (ct, x, y, z)."""

    components: tuple[float, float, float, float]

    def __post_init__(self):
        comps = tuple(float(c) for c in self.components)
        if len(comps) != 4:
            raise ValueError(f"FourVector needs 4 components, got {len(comps)}")
        if not all(np.isfinite(comps)):
            raise ValueError(f"FourVector components must be finite: {comps}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, ct: float, x: float, y: float, z: float) -> "FourVector":
        return cls((ct, x, y, z))

    def as_array(self) -> np.ndarray:
        return np.array(self.components)

    @property
    def spatial(self) -> np.ndarray:
        return np.array(self.components[1:])

    def __getitem__(self, index: int) -> float:
        return self.components[index]

    def __iter__(self):
        return iter(self.components)


VectorLike = Union[FourVector, np.ndarray, list, tuple]


def as_array(v: VectorLike) -> np.ndarray:
    """Return a float array of shape (4,) or (N, 4) for any vector-like input."""
    if isinstance(v, FourVector):
        return v.as_array()
    arr = np.asarray(v, dtype=float)
    if arr.shape[-1] != 4:
        raise ValueError(f"expected trailing dimension 4, got shape {arr.shape}")
    return arr


def lower(v: VectorLike):
    """Lower the index: (v0, v1, v2, v3) -> (v0, -v1, -v2, -v3)."""
    if isinstance(v, FourVector):
        return FourVector(tuple(v.as_array() * METRIC_DIAG))
    return as_array(v) * METRIC_DIAG


def raise_index(v: VectorLike):
    """Raise the index; identical to lower() for a diagonal +-1 metric."""
    return lower(v)


def minkowski_dot(a: VectorLike, b: VectorLike):
    """a0 b0 - a1 b1 - a2 b2 - a3 b3, broadcast over leading axes."""
    return np.sum(as_array(a) * METRIC_DIAG * as_array(b), axis=-1)


# =========================
# Physical Constants
# =========================
@dataclass(frozen=True)
class Constants:
    """Unit system: reduced Planck constant, speed of light, elementary charge."""

    hbar: float = 1.0
    c: float = 1.0
    e: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c", "e"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"constant {name} must be positive and finite, got {value}")

    def with_charge(self, e: float) -> "Constants":
        return Constants(hbar=self.hbar, c=self.c, e=e)


NATURAL = Constants()
CGS = Constants(hbar=1.054571817e-27, c=2.99792458e10, e=4.80320471e-10)

UNIT_PRESETS = {
    "natural": NATURAL,
    "cgs": CGS,
}


def constants_preset(name: str) -> Constants:
    """Look up a named unit system."""
    try:
        return UNIT_PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown unit preset '{name}' (choose from {sorted(UNIT_PRESETS)})") from None
