"""CSV serialization of solution fields.

1D states emit `x,u` rows over vertices and `x,v` rows over cell centers;
2D states emit `x,y,u` / `x,y,v`.  Headers are mandatory and every value is
printed with 17 significant digits so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .grids import Grid1D, Grid2D, State1D, State2D

FLOAT_FMT = "%.17g"


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([FLOAT_FMT % x for x in row])


def save_state_1d(state: State1D, grid: Grid1D, u_path, v_path):
    _write_rows(u_path, ["x", "u"], zip(grid.vertices, state.u))
    _write_rows(v_path, ["x", "v"], zip(grid.centers, state.v))


def save_state_2d(state: State2D, grid: Grid2D, u_path, v_path):
    xv, yv = np.meshgrid(grid.vertices, grid.vertices, indexing="ij")
    _write_rows(u_path, ["x", "y", "u"],
                zip(xv.ravel(), yv.ravel(), state.u.ravel()))
    xc, yc = np.meshgrid(grid.centers, grid.centers, indexing="ij")
    _write_rows(v_path, ["x", "y", "v"],
                zip(xc.ravel(), yc.ravel(), state.v.ravel()))


def read_columns(path, expected: list[str] | None = None):
    """Read a headered CSV into a dict of float arrays; used by tests and
    round-trip checks."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty CSV") from None
        rows = [row for row in reader if row]
    if expected is not None:
        missing = [c for c in expected if c not in header]
        if missing:
            raise ConfigError(f"{path}: missing column(s) {', '.join(missing)}")
    data = np.array([[float(x) for x in row] for row in rows]) if rows else np.empty((0, len(header)))
    return {name: data[:, j] for j, name in enumerate(header)}
