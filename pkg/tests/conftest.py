import numpy as np
import pytest

from pathgauge.fields import uniform_electric, uniform_field, uniform_magnetic
from pathgauge.paths import Waypoint, waypoint_chain
from pathgauge.potential import potential_at

E0 = np.array([0.3, -0.2, 0.5])
B0 = np.array([0.1, 0.4, -0.2])

# Generic evaluation points; none sits on an axis or a junction.
POINTS = [
    np.array([1.2, 0.7, -0.4, 0.9]),
    np.array([0.5, -1.1, 0.8, 0.3]),
    np.array([2.0, 0.4, 0.6, -1.3]),
]


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture
def uniform_e():
    return uniform_electric(E0)


@pytest.fixture
def uniform_b():
    return uniform_magnetic(B0)


@pytest.fixture
def uniform_eb():
    return uniform_field(E0, B0)


@pytest.fixture
def random_family(rng):
    """Factory for chains 0 -> M_1 x -> ... -> x with random matrices M_k."""

    def make(n_inner: int = 3, name: str = "random"):
        chain = [Waypoint.fixed(np.zeros(4))]
        chain += [Waypoint(np.zeros(4), rng.normal(size=(4, 4))) for _ in range(n_inner)]
        chain.append(Waypoint.target())
        return waypoint_chain(chain, name)

    return make


def curl(field, path, x, h, **quad):
    """d_mu A_nu - d_nu A_mu of the computed potential by central differences."""
    dA = np.empty((4, 4))
    for mu in range(4):
        step = np.zeros(4)
        step[mu] = h
        plus = potential_at(field, path, x + step, **quad).A
        minus = potential_at(field, path, x - step, **quad).A
        dA[mu] = (plus - minus) / (2.0 * h)
    return dA - dA.T
