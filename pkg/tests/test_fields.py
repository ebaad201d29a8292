import numpy as np
import pytest

from pathgauge.errors import SingularityError
from pathgauge.fields import (
    confined_electric_block,
    confined_magnetic_disk,
    field_tensor,
    monopole,
    step,
    tabulated_field,
    uniform_field,
    zero_field,
)

from conftest import B0, E0, POINTS


def test_step_takes_half_at_zero():
    assert np.array_equal(step(np.array([-1.0, 0.0, 2.0])), [0.0, 0.5, 1.0])


def test_field_tensor_layout():
    batch = field_tensor(np.array([1.0, 2.0, 3.0]), np.array([4.0, 5.0, 6.0]))
    assert batch.shape == (1, 4, 4)
    F = batch[0]
    assert np.allclose(F, -F.T)
    assert np.array_equal(F[0, 1:], [1.0, 2.0, 3.0])
    assert (F[1, 2], F[2, 3], F[3, 1]) == (-6.0, -4.0, -5.0)


@pytest.mark.parametrize(
    "field",
    [
        uniform_field(E0, B0),
        monopole(0.5),
        confined_magnetic_disk(1.0, 1.0),
        confined_electric_block(2.0, 1.0, 1.5),
    ],
    ids=lambda f: f.name,
)
def test_tensors_are_antisymmetric(field, rng):
    pts = rng.uniform(-3.0, 3.0, size=(1000, 4))
    F = field.evaluate(pts)
    assert F.shape == (1000, 4, 4)
    assert np.max(np.abs(F + np.swapaxes(F, 1, 2))) == 0.0


def test_electric_and_magnetic_views(uniform_eb):
    x = POINTS[0]
    assert np.allclose(uniform_eb.electric(x), E0)
    assert np.allclose(uniform_eb.magnetic(x), B0)
    up = uniform_eb.upper(x)
    assert np.allclose(up[0, 1:], -E0)


def test_uniform_field_rejects_bad_vectors():
    with pytest.raises(ValueError):
        uniform_field(E0=[1.0, 2.0])
    with pytest.raises(ValueError):
        uniform_field(B0=[np.inf, 0.0, 0.0])


def test_zero_field_is_zero():
    assert not np.any(zero_field().evaluate(np.array(POINTS)))


def test_monopole_is_radial_inverse_square():
    g = 0.5
    x = np.array([0.0, 1.0, 2.0, -2.0])
    r = 3.0
    assert np.allclose(monopole(g).magnetic(x), g * x[1:] / r**3)


def test_monopole_guard_zone():
    field = monopole(0.5)
    with pytest.raises(SingularityError):
        field.evaluate([0.0, 0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        monopole(0.0)


def test_disk_inside_and_outside():
    field = confined_magnetic_disk(2.0, 1.0)
    assert field.confined
    assert np.allclose(field.magnetic([0.0, 0.3, 0.4, 5.0]), [0.0, 0.0, 2.0])
    assert np.allclose(field.magnetic([0.0, 1.2, 0.4, 0.0]), 0.0)
    # on the wall the step convention gives half the value
    assert np.allclose(field.magnetic([0.0, 1.0, 0.0, 0.0]), [0.0, 0.0, 1.0])


def test_eblock_window():
    field = confined_electric_block(E0=2.0, dt=0.5, dx=1.0, c=2.0)
    assert np.allclose(field.electric([0.5, 0.5, 0.0, 0.0]), [2.0, 0.0, 0.0])
    assert np.allclose(field.electric([1.5, 0.5, 0.0, 0.0]), 0.0)
    assert np.allclose(field.electric([0.5, -0.1, 0.0, 0.0]), 0.0)
    assert len(field.discontinuities) == 4


def test_confined_builders_validate():
    with pytest.raises(ValueError):
        confined_magnetic_disk(1.0, 0.0)
    with pytest.raises(ValueError):
        confined_electric_block(1.0, -1.0, 1.0)


def test_tabulated_field_interpolates_and_vanishes_outside():
    axes = [np.linspace(-1.0, 1.0, 3)] * 4
    values = np.zeros((3, 3, 3, 3, 6))
    values[..., 0] = 1.5
    values[..., 5] = -0.5
    field = tabulated_field(axes, values)
    assert field.confined
    assert np.allclose(field.electric([0.2, 0.1, -0.3, 0.4]), [1.5, 0.0, 0.0])
    assert np.allclose(field.magnetic([0.2, 0.1, -0.3, 0.4]), [0.0, 0.0, -0.5])
    assert not np.any(field.evaluate([0.0, 2.0, 0.0, 0.0]))


def test_tabulated_field_shape_check():
    axes = [np.linspace(0.0, 1.0, 2)] * 4
    with pytest.raises(ValueError):
        tabulated_field(axes, np.zeros((2, 2, 2, 2, 3)))


def _divergence(field, x, h):
    div = 0.0
    for i in range(1, 4):
        e = np.zeros(4)
        e[i] = h
        div += (field.magnetic(x + e)[i - 1] - field.magnetic(x - e)[i - 1]) / (2.0 * h)
    return div


@pytest.mark.parametrize(
    "field",
    [uniform_field(E0, B0), monopole(0.5), monopole(-2.0), confined_magnetic_disk(1.0, 1.0)],
    ids=["uniform", "monopole", "antimonopole", "disk"],
)
def test_magnetic_field_is_divergence_free(field, rng):
    checked = 0
    while checked < 50:
        x = np.concatenate([[0.0], rng.uniform(-3.0, 3.0, size=3)])
        r = np.linalg.norm(x[1:])
        rho = np.hypot(x[1], x[2])
        if r < 0.1 or abs(rho - 1.0) < 0.05:
            continue
        # stencil truncation error grows like |B| / r near the monopole
        bound = 1e-6 * max(1.0, np.linalg.norm(field.magnetic(x)) / r)
        assert abs(_divergence(field, x, 1e-4 * r)) <= bound
        checked += 1
