import json

import numpy as np
import pytest
from pydantic import ValidationError

from pathgauge.config import PRESET_NAMES
from pathgauge.errors import ScenarioError
from pathgauge.scenarios import (
    GridSpec,
    Scenario,
    build_closed_form,
    build_field,
    build_paths,
    dump_scenario,
    list_presets,
    load_preset,
    load_scenario,
    parse_scenario,
)


def minimal(**changes) -> dict:
    data = {
        "name": "tiny",
        "field": {"kind": "uniform_electric", "params": {"E0": [0.3, -0.2, 0.5]}},
        "paths": {"v": {"builtin": "velocity"}, "l": {"builtin": "length"}},
        "tasks": [
            {"name": "pot", "kind": "potential", "path": "v", "grid": {"points": [[1.0, 0.5, 0.2, -0.1]]}},
            {"name": "loop", "kind": "flux", "path_a": "v", "path_b": "l", "grid": {"points": [[1.0, 0.5, 0.2, -0.1]]}},
        ],
    }
    data.update(changes)
    return data


def test_presets_are_listed_in_order():
    presets = list_presets()
    assert [name for name, _ in presets] == list(PRESET_NAMES)
    assert all(description for _, description in presets)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_presets_round_trip(name):
    scenario = load_preset(name)
    assert scenario.name == name
    assert parse_scenario(json.loads(dump_scenario(scenario))) == scenario


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_preset_builders_accept_their_parameters(name):
    scenario = load_preset(name)
    build_field(scenario.field)
    build_paths(scenario)


def test_unknown_preset_suggests_close_names():
    with pytest.raises(ScenarioError, match="Did you mean: velocity-gauge"):
        load_preset("velocity-gage")


def test_minimal_defaults():
    scenario = parse_scenario(minimal())
    assert scenario.constants.build().e == 1.0
    assert scenario.tolerances.quad() == {"tol": 1e-10, "order": 32, "max_depth": 20}
    assert scenario.tasks[1].route == "auto"


def test_unknown_key_is_a_schema_error():
    with pytest.raises(ValidationError):
        parse_scenario(minimal(colour="blue"))


def test_unknown_task_kind_is_a_schema_error():
    data = minimal()
    data["tasks"][0]["kind"] = "teleport"
    with pytest.raises(ValidationError):
        parse_scenario(data)


def test_unknown_path_reference():
    data = minimal()
    data["tasks"][0]["path"] = "nowhere"
    with pytest.raises(ScenarioError, match="unknown path 'nowhere'"):
        parse_scenario(data)


def test_duplicate_task_names():
    data = minimal()
    data["tasks"][1]["name"] = "pot"
    with pytest.raises(ScenarioError, match="Duplicate task name"):
        parse_scenario(data)


def test_quantize_source_must_be_an_earlier_flux_task():
    data = minimal()
    data["tasks"].insert(0, {"name": "q", "kind": "quantize", "source": "loop"})
    with pytest.raises(ScenarioError, match="unknown or later task"):
        parse_scenario(data)
    data = minimal()
    data["tasks"].append({"name": "q", "kind": "quantize", "source": "pot"})
    with pytest.raises(ScenarioError):
        parse_scenario(data)
    data = minimal()
    data["tasks"].append({"name": "q", "kind": "quantize", "source": "loop"})
    parse_scenario(data)


def test_unknown_builtin_path():
    data = minimal(paths={"v": {"builtin": "spiral"}, "l": {"builtin": "length"}})
    with pytest.raises(ScenarioError, match="unknown builtin"):
        parse_scenario(data)


def test_schema_version_mismatch():
    with pytest.raises(ScenarioError, match="schema_version"):
        parse_scenario(minimal(schema_version=2))


def test_bad_pair_geometry_is_caught_at_load_time():
    data = minimal(
        tasks=[
            {
                "name": "pairs",
                "kind": "oned",
                "pairs": [{"electron": [[0.0, 0.0], [1.0, 2.0]], "positron": [[0.0, 0.0], [1.0, -0.5]]}],
            }
        ]
    )
    with pytest.raises(ScenarioError, match="pair 0"):
        parse_scenario(data)


def test_grid_sources_are_exclusive():
    with pytest.raises(ValidationError):
        GridSpec(points=[[0.0, 0.0, 0.0, 0.0]], random={"count": 2, "low": [0] * 4, "high": [1] * 4})
    with pytest.raises(ValidationError):
        GridSpec()


def test_grid_ranges_put_ct_slowest():
    grid = GridSpec(
        ranges=[
            {"start": 0.0, "stop": 1.0, "num": 2},
            {"start": -1.0, "stop": 1.0, "num": 3},
            {"start": 0.0, "stop": 0.0},
            {"start": 0.5, "stop": 0.5},
        ]
    ).build()
    assert len(grid) == 6
    assert np.array_equal(grid[0], [0.0, -1.0, 0.0, 0.5])
    assert np.array_equal(grid[1], [0.0, 0.0, 0.0, 0.5])
    assert np.array_equal(grid[3], [1.0, -1.0, 0.0, 0.5])


def test_random_grid_is_seeded():
    spec = GridSpec(random={"count": 5, "low": [0.0, -1.0, -1.0, -1.0], "high": [1.0, 1.0, 1.0, 1.0]})
    first, again, other = spec.build(7), spec.build(7), spec.build(8)
    assert all(np.array_equal(a, b) for a, b in zip(first, again))
    assert not np.array_equal(first[0], other[0])
    assert all(0.0 <= p[0] <= 1.0 for p in first)


def test_overrides_are_revalidated():
    scenario = parse_scenario(minimal())
    changed = scenario.with_overrides(tol=1e-8, quad_order=16, seed=3)
    assert changed.tolerances.quad_tol == 1e-8
    assert changed.tolerances.quad_order == 16
    assert changed.seed == 3
    with pytest.raises(ValidationError):
        scenario.with_overrides(tol=-1.0)


def test_scenarios_are_frozen():
    scenario = parse_scenario(minimal())
    with pytest.raises(ValidationError):
        scenario.name = "other"


def test_builder_errors_become_scenario_errors():
    data = minimal(field={"kind": "monopole", "params": {"g": 0.0}})
    scenario = Scenario.model_validate(data)
    with pytest.raises(ScenarioError, match="field 'monopole'"):
        build_field(scenario.field)
    with pytest.raises(ScenarioError, match="closed form"):
        build_closed_form("disk", {}, scenario.field)


def test_closed_form_takes_field_parameters():
    scenario = load_preset("disk-flux")
    A = build_closed_form("disk", {}, scenario.field)
    assert np.allclose(A(np.array([0.0, 2.0, 0.0, 0.0])), [0.0, 0.0, 0.25, 0.0])


def test_load_scenario_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_scenario(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ScenarioError, match="Could not parse"):
        load_scenario(broken)
