import json

import pytest

from pathgauge.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, main
from pathgauge.config import PRESET_NAMES

QUICK = {
    "name": "quick",
    "field": {"kind": "uniform_electric", "params": {"E0": [0.3, -0.2, 0.5]}},
    "paths": {"v": {"builtin": "velocity"}, "l": {"builtin": "length"}},
    "tasks": [
        {
            "name": "potential",
            "kind": "gauge_compare",
            "path": "v",
            "closed_form": "velocity",
            "grid": {"random": {"count": 6, "low": [0.0, -2.0, -2.0, -2.0], "high": [2.0, 2.0, 2.0, 2.0]}},
        },
        {"name": "loop", "kind": "flux", "path_a": "v", "path_b": "l", "grid": {"points": [[1.0, 0.5, 0.5, 0.0]]}},
        {"name": "quantum", "kind": "quantize", "source": "loop"},
    ],
}


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_list(capsys):
    assert main(["list"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == len(PRESET_NAMES)
    assert lines[0].startswith("velocity-gauge")


def test_preset_show(capsys):
    assert main(["preset", "dirac-monopole", "--show"]) == EXIT_OK
    shown = json.loads(capsys.readouterr().out)
    assert shown["name"] == "dirac-monopole"


def test_unknown_preset(capsys):
    assert main(["preset", "dirac-monopol"]) == EXIT_INVALID
    assert "Did you mean: dirac-monopole" in capsys.readouterr().err


def test_run_writes_one_csv_per_task(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", write_config(tmp_path, QUICK), "--out", str(out)]) == EXIT_OK
    files = sorted(p.name for p in (out / "quick").iterdir())
    assert files == ["loop.csv", "potential.csv", "quantum.csv"]
    header = (out / "quick" / "potential.csv").read_text().splitlines()[0]
    assert header == "x0,x1,x2,x3,A_0,A_1,A_2,A_3,err,deviation"
    loop = (out / "quick" / "loop.csv").read_text().splitlines()
    assert loop[0] == "x0,x1,x2,x3,flux,err"
    assert float(loop[1].split(",")[4]) == pytest.approx(-1.0 * (0.5 * 0.3 - 0.5 * 0.2), abs=1e-9)
    assert (out / "quick" / "quantum.csv").read_text().splitlines()[0] == "phase,n,residual,quantized"
    assert "Scenario: quick" in capsys.readouterr().out


def test_output_is_identical_across_runs_and_threads(tmp_path):
    config = write_config(tmp_path, QUICK)
    contents = []
    for k, threads in enumerate(["1", "1", "4"]):
        out = tmp_path / f"out{k}"
        assert main(["run", config, "--out", str(out), "--threads", threads]) == EXIT_OK
        contents.append({p.name: p.read_bytes() for p in (out / "quick").iterdir()})
    assert contents[0] == contents[1] == contents[2]


def test_seed_override_changes_random_grids(tmp_path):
    config = write_config(tmp_path, QUICK)
    assert main(["run", config, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["run", config, "--out", str(tmp_path / "b"), "--seed", "99"]) == EXIT_OK
    a = (tmp_path / "a" / "quick" / "potential.csv").read_text()
    b = (tmp_path / "b" / "quick" / "potential.csv").read_text()
    assert a != b


def test_malformed_config_writes_nothing(tmp_path, capsys):
    config = tmp_path / "broken.json"
    config.write_text("{not json", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["run", str(config), "--out", str(out)]) == EXIT_INVALID
    assert not out.exists()
    assert "Could not parse" in capsys.readouterr().err


def test_schema_error(tmp_path, capsys):
    data = {**QUICK, "tasks": [{"name": "x", "kind": "flux", "path_a": "v"}]}
    assert main(["run", write_config(tmp_path, data), "--out", str(tmp_path / "out")]) == EXIT_INVALID
    assert "schema" in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert main(["run", str(tmp_path / "nope.json")]) == EXIT_INVALID


def test_numerical_failure_writes_nothing(tmp_path, capsys):
    data = {
        "name": "on-the-string",
        "field": {"kind": "monopole", "params": {"g": 0.5}},
        "paths": {"north": {"builtin": "monopole_north"}},
        "tasks": [
            {"name": "string", "kind": "potential", "path": "north", "grid": {"points": [[0.0, 0.0, 0.0, 1.0]]}}
        ],
    }
    out = tmp_path / "out"
    assert main(["run", write_config(tmp_path, data), "--out", str(out)]) == EXIT_NUMERICAL
    assert not out.exists()
    assert "Numerical failure in task 'string'" in capsys.readouterr().err


def test_oned_preset(tmp_path):
    out = tmp_path / "out"
    assert main(["preset", "oned-pair", "--out", str(out), "--quad-order", "8"]) == EXIT_OK
    rows = (out / "oned-pair" / "pairs.csv").read_text().splitlines()
    assert rows[0] == "area,flux,field_flux,phase,n,residual,quantized"
    assert len(rows) == 4
    assert rows[1].split(",")[-1] == "true"


@pytest.mark.slow
@pytest.mark.parametrize("name", PRESET_NAMES)
def test_every_preset_runs(tmp_path, name):
    assert main(["preset", name, "--out", str(tmp_path)]) == EXIT_OK
    assert any((tmp_path / name).iterdir())
