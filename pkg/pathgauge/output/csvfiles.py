"""
Deterministic CSV output.

Floats are printed with CSV_DIGITS significant digits, booleans as
true/false, and lines end in a bare newline on every platform.
"""

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from pathgauge.config import CSV_DIGITS


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{CSV_DIGITS}g")
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """
    Write one CSV file with a header row.

    Args:
        path: destination file; parent directories are created
        header: column names
        rows: rows of the same width as the header

    Returns:
        The path written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"{path.name}: row of width {len(row)} under a header of width {len(header)}")
            writer.writerow([format_cell(v) for v in row])
    return path
