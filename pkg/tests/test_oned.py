import math

import numpy as np
import pytest

from pathgauge.errors import GeometryError
from pathgauge.oned import (
    PairGeometry,
    Worldline1D,
    causal_field_1d,
    check_1d_quantization,
    estimate_alpha1,
    field_route_flux,
    pair_field,
    pair_flux,
    source_coefficient,
)
from pathgauge.quantization import check_phase
from pathgauge.spacetime import Constants


def test_source_coefficient_low_dimensions():
    assert source_coefficient(1) == pytest.approx(2.0, rel=1e-15)
    assert source_coefficient(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert source_coefficient(3) == pytest.approx(4 * math.pi, rel=1e-15)


@pytest.mark.parametrize("d", range(1, 9))
def test_source_coefficient_recurrence(d):
    assert source_coefficient(d + 2) == pytest.approx(source_coefficient(d) * 2 * math.pi / d, rel=1e-12)


@pytest.mark.parametrize("d", [0, -1, 2.5, True])
def test_source_coefficient_rejects(d):
    with pytest.raises(ValueError):
        source_coefficient(d)


STATIC = Worldline1D(np.array([[0.0, 0.0], [10.0, 0.0]]))


def test_static_charge_field():
    assert causal_field_1d(1.0, STATIC, 5.0, 2.0) == (1.0, True)
    assert causal_field_1d(1.0, STATIC, 5.0, -2.0) == (-1.0, True)
    assert causal_field_1d(1.0, STATIC, 5.0, 0.0)[0] == 0.0


def test_outside_the_causal_future():
    assert causal_field_1d(1.0, STATIC, 1.0, 5.0) == (0.0, False)


def test_field_is_antisymmetric_about_the_charge():
    line = Worldline1D(np.array([[0.0, 1.0], [20.0, 1.0]]))
    for d in (0.5, 1.3, 2.0):
        right, _ = causal_field_1d(2.0, line, 10.0, 1.0 + d)
        left, _ = causal_field_1d(2.0, line, 10.0, 1.0 - d)
        assert right == -left == 2.0


def test_moving_charge_uses_the_retarded_position():
    line = Worldline1D(np.array([[0.0, 0.0], [10.0, 5.0]]))
    # the ray from the right left the charge at (4, 2)
    assert causal_field_1d(1.0, line, 6.0, 0.0) == (-1.0, True)


def test_time_is_scaled_by_c():
    assert causal_field_1d(1.0, STATIC, 2.5, 2.0, c=2.0) == causal_field_1d(1.0, STATIC, 5.0, 2.0)


def test_worldline_validation():
    with pytest.raises(GeometryError, match="timelike"):
        Worldline1D(np.array([[0.0, 0.0], [1.0, 2.0]]))
    with pytest.raises(GeometryError, match="backwards"):
        Worldline1D(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(GeometryError):
        Worldline1D(np.array([[0.0, 0.0]]))
    Worldline1D(np.array([[0.0, 0.0], [0.0, 1.0]]), strict=False)


def test_position_interpolates():
    line = Worldline1D(np.array([[0.0, 0.0], [2.0, 1.0], [4.0, 1.0]]))
    assert line.position(1.0) == pytest.approx(0.5)
    assert line.position(3.0) == pytest.approx(1.0)
    with pytest.raises(GeometryError):
        line.position(5.0)


def test_rectangle_and_diamond_areas():
    assert PairGeometry.rectangle(2.0, 0.5).area == pytest.approx(1.0)
    assert PairGeometry.diamond(2.0, 0.5).area == pytest.approx(1.0)
    assert PairGeometry.rectangle(2.0, 0.0).area == 0.0
    assert pair_flux(PairGeometry.rectangle(2.0, 0.5), 1.5) == pytest.approx(3.0)


def test_pair_endpoints_must_match():
    electron = Worldline1D(np.array([[0.0, 0.0], [1.0, 0.3], [2.0, 0.0]]))
    positron = Worldline1D(np.array([[0.0, 0.0], [1.0, -0.3], [2.5, 0.0]]))
    with pytest.raises(GeometryError, match="events differ"):
        PairGeometry(electron, positron)


def test_self_crossing_pair():
    electron = Worldline1D(np.array([[0.0, 0.0], [1.0, 0.4], [2.0, -0.4], [3.0, 0.0]]))
    positron = Worldline1D(np.array([[0.0, 0.0], [3.0, 0.0]]))
    with pytest.raises(GeometryError, match="crosses itself"):
        PairGeometry(electron, positron)


def test_field_between_a_timelike_pair():
    pair = PairGeometry.diamond(2.0, 0.5)
    assert pair_field(pair, 1.0, 1.0, 0.0) == pytest.approx(2.0)
    assert pair_field(pair, 1.0, 1.0, 3.0) == 0.0


def test_field_route_of_the_diamond():
    pair = PairGeometry.diamond(2.0, 0.5)
    assert field_route_flux(pair, 1.0) == pytest.approx(pair_flux(pair, 1.0), rel=1e-8)


def test_field_route_of_the_rectangle_misses_the_acausal_corners():
    cT, L, e = 2.0, 0.5, 1.0
    pair = PairGeometry.rectangle(cT, L)
    assert field_route_flux(pair, e) == pytest.approx(2 * e * (cT * L - L**2 / 4), rel=1e-8)


@pytest.mark.slow
def test_field_route_of_random_convex_pairs(rng):
    for _ in range(20):
        T = rng.uniform(1.0, 3.0)
        t1, t2 = rng.uniform(0.3 * T, 0.7 * T, size=2)
        a = rng.uniform(0.05, 0.9) * min(t1, T - t1)
        b = rng.uniform(0.05, 0.9) * min(t2, T - t2)
        electron = Worldline1D(np.array([[0.0, 0.0], [t1, a], [T, 0.0]]))
        positron = Worldline1D(np.array([[0.0, 0.0], [t2, -b], [T, 0.0]]))
        pair = PairGeometry(electron, positron)
        assert pair.area == pytest.approx(T * (a + b) / 2, rel=1e-12)
        assert field_route_flux(pair, 1.0, order=8) == pytest.approx(2 * pair.area, rel=1e-6)


def test_one_dimensional_quantization():
    report = check_1d_quantization(1.0, math.pi)
    assert report.quantized and report.n_nearest == 1
    assert not check_1d_quantization(0.5, math.pi).quantized
    with pytest.raises(ValueError):
        check_1d_quantization(-1.0, math.pi)
    with pytest.raises(ValueError):
        check_1d_quantization(1.0, 0.0)


def test_one_dimensional_rule_matches_the_flux_phase():
    e = 0.5
    constants = Constants(e=e)
    alpha1 = e * e / (constants.hbar * constants.c)
    area = 4 * math.pi
    pair_phase = check_phase(2 * e * area, constants)
    assert check_1d_quantization(area, alpha1) == pair_phase


def test_alpha1_estimate_scales_with_mass():
    base = estimate_alpha1(1.0)
    assert base.area_max == pytest.approx(1.0 / 8.0)
    assert base.alpha_scale == pytest.approx(8 * math.pi)
    assert base.compton_wavelength == pytest.approx(1.0)
    assert estimate_alpha1(2.0).alpha_scale == pytest.approx(4 * base.alpha_scale)
    for m in (0.5, 1.0, 3.0):
        est = estimate_alpha1(m)
        assert est.alpha_scale * est.compton_wavelength**2 == pytest.approx(8 * math.pi, rel=1e-12)
    with pytest.raises(ValueError):
        estimate_alpha1(0.0)
