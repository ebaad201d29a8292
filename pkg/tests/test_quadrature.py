import logging

import numpy as np
import pytest

from pathgauge.errors import QuadratureError
from pathgauge.quadrature import GaussLegendre, crossings, get_rule, integrate


def test_polynomial_is_exact():
    res = integrate(lambda s: 5 * s**4 - 3 * s**2 + 1, 0.0, 2.0)
    assert res.value == pytest.approx(32 - 8 + 2, abs=1e-13)
    assert res.panels == 1


def test_smooth_integrand():
    res = integrate(np.sin, 0.0, np.pi, tol=1e-12)
    assert res.value == pytest.approx(2.0, abs=1e-12)


def test_vector_valued_integrand():
    res = integrate(lambda s: np.stack([s, s**2], axis=-1), 0.0, 1.0)
    assert np.allclose(res.value, [0.5, 1.0 / 3.0], atol=1e-14)


def test_reversed_and_empty_limits():
    assert integrate(np.cos, 1.0, 0.0).value == pytest.approx(-np.sin(1.0), abs=1e-13)
    assert integrate(np.cos, 1.0, 1.0).value == 0.0


def test_breakpoints_resolve_a_jump():
    def jump(s):
        return np.where(s < 0.3, 1.0, 2.0)

    res = get_rule().integrate(jump, 0.0, 1.0, breakpoints=[0.3])
    assert res.value == pytest.approx(0.3 + 1.4, abs=1e-13)


def test_jump_without_breakpoint_fails_at_max_depth():
    def jump(s):
        return np.where(s < 1.0 / 3.0, 0.0, 1.0)

    with pytest.raises(QuadratureError):
        get_rule().integrate(jump, 0.0, 1.0, tol=1e-14, max_depth=3)


def test_rule_validation():
    with pytest.raises(ValueError):
        GaussLegendre(16, 16)
    assert get_rule(32) is get_rule(32)


def test_crossings_finds_interior_roots():
    roots = crossings(np.sin, 0.5, 10.0)
    assert np.allclose(roots, [np.pi, 2 * np.pi, 3 * np.pi], atol=1e-10)
    assert crossings(lambda s: s + 2.0) == []


def test_non_strict_keeps_the_unconverged_panel(caplog):
    def jump(s):
        return np.where(s < 1.0 / 3.0, 0.0, 1.0)

    with caplog.at_level(logging.WARNING, logger="pathgauge.quadrature"):
        res = get_rule().integrate(jump, 0.0, 1.0, tol=1e-14, max_depth=3, strict=False)
    assert res.value == pytest.approx(2.0 / 3.0, abs=0.1)
    assert res.error > 1e-14
    assert "above tolerance" in caplog.text


@pytest.mark.parametrize("offset", [0.0, 1e-14], ids=["touch", "near-touch"])
def test_crossings_reports_a_tangent_touch(caplog, offset):
    with caplog.at_level(logging.WARNING, logger="pathgauge.quadrature"):
        roots = crossings(lambda s: (s - 0.5) ** 2 + offset)
    assert "touched without crossing" in caplog.text
    assert roots == ([0.5] if offset == 0.0 else [])


def test_crossings_is_quiet_on_a_clean_crossing(caplog):
    with caplog.at_level(logging.WARNING, logger="pathgauge.quadrature"):
        assert crossings(lambda s: s - 0.3) == [pytest.approx(0.3, abs=1e-12)]
        crossings(lambda s: (s - 0.5) ** 2, report_touches=False)
    assert caplog.text == ""
