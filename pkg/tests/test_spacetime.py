import numpy as np
import pytest

from pathgauge.spacetime import (
    CGS,
    NATURAL,
    Constants,
    FourVector,
    as_array,
    constants_preset,
    lower,
    minkowski_dot,
    raise_index,
)


def test_minkowski_dot_signature():
    assert minkowski_dot([1, 0, 0, 0], [1, 0, 0, 0]) == 1.0
    assert minkowski_dot([0, 1, 0, 0], [0, 1, 0, 0]) == -1.0
    assert minkowski_dot([2, 1, 1, 1], [3, 1, 2, 3]) == pytest.approx(6 - 1 - 2 - 3)


def test_minkowski_dot_broadcasts():
    a = np.array([[1.0, 0, 0, 0], [2.0, 1.0, 0, 0]])
    assert np.allclose(minkowski_dot(a, a), [1.0, 3.0])


def test_lower_keeps_type():
    v = FourVector.of(1, 2, 3, 4)
    assert lower(v) == FourVector.of(1, -2, -3, -4)
    assert np.array_equal(lower(np.array([1.0, 2, 3, 4])), [1.0, -2, -3, -4])
    assert np.array_equal(raise_index(lower([1.0, 2, 3, 4])), [1.0, 2, 3, 4])


def test_four_vector_validation():
    with pytest.raises(ValueError):
        FourVector((1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        FourVector((1.0, np.nan, 0.0, 0.0))
    v = FourVector.of(0.5, 1, 2, 3)
    assert v[0] == 0.5
    assert np.array_equal(v.spatial, [1.0, 2.0, 3.0])
    assert list(v) == [0.5, 1.0, 2.0, 3.0]


def test_as_array_rejects_wrong_width():
    with pytest.raises(ValueError):
        as_array([1.0, 2.0, 3.0])


def test_constants():
    assert NATURAL == Constants(1.0, 1.0, 1.0)
    assert constants_preset("cgs") is CGS
    assert NATURAL.with_charge(0.5).e == 0.5
    with pytest.raises(ValueError):
        Constants(hbar=0.0)
    with pytest.raises(ValueError):
        Constants(c=-1.0)
    with pytest.raises(ValueError, match="unknown unit preset"):
        constants_preset("si")
