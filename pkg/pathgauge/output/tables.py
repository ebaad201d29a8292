"""
Plain-text summary tables for stdout.
"""

from typing import Sequence

import numpy as np

from pathgauge.strings import t

MAX_TABLE_ROWS = 12


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "yes" if value else "no"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".10g")
    return str(value)


def format_table(header: Sequence[str], rows: Sequence[Sequence], max_rows: int = MAX_TABLE_ROWS) -> str:
    """Right-aligned columns; rows beyond max_rows are elided with a count."""
    shown = [[_cell(v) for v in row] for row in rows[:max_rows]]
    widths = [len(h) for h in header]
    for row in shown:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in shown]
    if len(rows) > max_rows:
        lines.append(f"... {len(rows) - max_rows} more row(s)")
    return "\n".join(lines)


def render_task(output) -> str:
    """Header line, key/value facts and the display table of one task."""
    parts = [t("task_header", kind=output.kind, task=output.name)]
    width = max((len(k) for k in output.summary), default=0)
    for key, value in output.summary.items():
        parts.append(f"  {key.ljust(width)}  {_cell(value)}")
    if output.table is not None:
        header, rows = output.table
        parts.append(format_table(header, rows))
    return "\n".join(parts)


def render_scenario(name: str, outputs: Sequence) -> str:
    blocks = [t("scenario_header", name=name)]
    blocks += [render_task(o) for o in outputs]
    return "\n\n".join(blocks)
