import numpy as np
import pytest

from pathgauge.output.csvfiles import format_cell, write_csv
from pathgauge.output.tables import format_table, render_scenario
from pathgauge.runner import TaskOutput


def test_format_cell():
    assert format_cell(True) == "true"
    assert format_cell(np.bool_(False)) == "false"
    assert format_cell(np.int64(-3)) == "-3"
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(np.float64(2.0)) == "2"
    assert format_cell(float("nan")) == "nan"


def test_write_csv(tmp_path):
    path = write_csv(tmp_path / "nested" / "out.csv", ["a", "b"], [[1, 0.5], [True, 1e-20]])
    assert path.read_bytes() == b"a,b\n1,0.5\ntrue,9.9999999999999995e-21\n"


def test_write_csv_checks_row_width(tmp_path):
    with pytest.raises(ValueError, match="width"):
        write_csv(tmp_path / "bad.csv", ["a", "b"], [[1.0]])


def test_format_table_elides_long_tables():
    text = format_table(["n", "ok"], [[i, i % 2 == 0] for i in range(15)], max_rows=4)
    lines = text.splitlines()
    assert lines[0].split() == ["n", "ok"]
    assert lines[2].split() == ["0", "yes"]
    assert lines[-1] == "... 11 more row(s)"


def test_render_scenario():
    out = TaskOutput("loop", "flux", ["flux"], [[1.0]], {"points": 1}, (["flux"], [[1.0]]))
    text = render_scenario("demo", [out])
    assert text.startswith("Scenario: demo")
    assert "[flux] loop" in text
    assert "points  1" in text
