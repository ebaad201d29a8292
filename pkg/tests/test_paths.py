import numpy as np
import pytest

from pathgauge.errors import PathError
from pathgauge.paths import (
    LinearSegment,
    LoopSpec,
    PathFamily,
    Waypoint,
    builtin_path,
    concatenate_winding,
    length_path,
    loop_curve,
    monopole_north_path,
    straight_line_path,
    velocity_path,
    waypoint_chain,
    waypoint_path,
)

from conftest import POINTS

BUILTINS = [
    "velocity",
    "length",
    "straight_line",
    "monopole_north",
    "monopole_south",
    "monopole_full",
    "disk_p1",
    "disk_p2",
    "eblock_p1",
    "eblock_p2",
]


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_families_are_continuous(name):
    path = builtin_path(name)
    path.validate(POINTS)


def test_unknown_builtin():
    with pytest.raises(PathError, match="unknown builtin"):
        builtin_path("spiral")


def test_velocity_path_geometry():
    x = POINTS[0]
    path = velocity_path()
    assert np.allclose(path.point(0.5, x), [0.0, *x[1:]])
    assert np.allclose(path.point(0.25, x), [0.0, *(0.5 * x[1:])])
    assert np.allclose(path.point(0.75, x), [0.5 * x[0], *x[1:]])


def test_length_path_geometry():
    x = POINTS[1]
    assert np.allclose(length_path().point(0.5, x), [x[0], 0.0, 0.0, 0.0])


def test_global_jacobians_scale_with_segment_count():
    x = POINTS[0]
    dyds, dydx = velocity_path().jacobians(0.25, x)
    assert np.allclose(dyds, [0.0, *(2.0 * x[1:])])
    assert np.allclose(dydx, np.diag([0.0, 0.5, 0.5, 0.5]))


def test_junctions_are_rejected_by_locate():
    path = velocity_path()
    with pytest.raises(PathError, match="junction"):
        path.locate(0.5)
    assert path.locate(0.3) == (0, pytest.approx(0.6))
    with pytest.raises(PathError):
        path.point(1.5, POINTS[0])


def test_finite_difference_mode_matches_analytic(rng):
    x = POINTS[2]
    chain = [Waypoint.fixed(np.zeros(4)), Waypoint(np.zeros(4), rng.normal(size=(4, 4))), Waypoint.target()]
    analytic = waypoint_chain(chain, "r")
    fd = analytic.with_mode("finite-difference")
    s = np.linspace(0.05, 0.95, 7)
    for k in range(2):
        a_s, a_x = analytic.segment_jacobians(k, s, x)
        f_s, f_x = fd.segment_jacobians(k, s, x)
        assert np.allclose(a_s, f_s, atol=1e-8)
        assert np.allclose(a_x, f_x, atol=1e-8)


def test_bad_chains():
    with pytest.raises(PathError):
        waypoint_chain([Waypoint.target(), Waypoint.target()], "moving start")
    with pytest.raises(PathError):
        waypoint_chain([Waypoint.fixed(np.zeros(4))], "short")
    with pytest.raises(PathError):
        velocity_path().with_mode("symbolic")


def test_validate_catches_a_wrong_start():
    segment = LinearSegment(Waypoint.fixed(np.zeros(4)), Waypoint.target())
    shifted = PathFamily((segment,), np.ones(4), name="shifted")
    with pytest.raises(PathError, match="differs from x0"):
        shifted.validate(POINTS)


def test_waypoint_path_ends_at_x():
    path = waypoint_path([[0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0]])
    assert path.n_segments == 2
    assert np.allclose(path.point(1.0, POINTS[0]), POINTS[0])


def test_monopole_paths_refuse_the_string():
    path = monopole_north_path()
    with pytest.raises(PathError, match="Dirac string"):
        path.check_clearance(np.array([0.0, 0.0, 0.0, 2.0]))
    path.check_clearance(POINTS[0])


def test_loop_spec_checks():
    with pytest.raises(ValueError):
        LoopSpec(velocity_path(), length_path(), winding=0)
    with pytest.raises(PathError, match="loop endpoints differ"):
        LoopSpec(velocity_path(), straight_line_path(x0=(1.0, 0.0, 0.0, 0.0)))


def test_winding_concatenation_layout():
    loop = LoopSpec(velocity_path(), length_path(), winding=3)
    wound = concatenate_winding(loop)
    assert wound.n_segments == 2 + 3 * 4
    assert np.allclose(wound.point(1.0, POINTS[0]), POINTS[0])


def test_loop_curve_is_closed():
    x = POINTS[0]
    curve = loop_curve(LoopSpec(velocity_path(), length_path()), x)
    ends = curve.point(np.array([0.0, 1.0]))
    assert np.allclose(ends[0], ends[1])
    assert np.allclose(curve.point(np.array([0.5])), x)
