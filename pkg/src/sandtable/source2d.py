"""Transport-ray splitting f = f1 + f2 of a 2D source and the absorbed
primitives Bx(x,y) = int_0^x f1, By(x,y) = int_0^y f2.

Open table: rays are axis-aligned per region, so f1 is f restricted to the
left/right triangles {x>=y, x+y>=1} u {x<=y, x+y<=1} (ties go to f1; the
choice is measure zero) and the row/column primitives are exact interval
overlaps.  Partially open table: rays fan out from the pole (1/2, 0) and the
split is cos^2/sin^2 of the ray angle, integrated by a composite trapezoidal
rule with nodes at every half cell; region crossings for the piecewise
sources are inserted exactly so indicator jumps are not smeared.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .grids import Grid2D
from .sources import SourceSpec1D

_TABLES_2D = ("open", "partial")


def split_open(f_val, x, y):
    """(f1, f2) at a point for the open table; f2 = f - f1 exactly."""
    in_f1 = ((x >= y) & (x + y >= 1.0)) | ((x <= y) & (x + y <= 1.0))
    f1 = np.where(in_f1, f_val, 0.0)
    return f1, f_val - f1


def split_partial(f_val, x, y):
    """Ray splitting when only the bottom segment left of 1/2 is open.

    Left of the pole (1/2, 0) the transport rays run straight down to the
    open segment, so the source is purely y-transported.  Right of the pole
    every ray passes through the pole and the split is cos^2/sin^2 of the ray
    angle, computed trig-free as f*(x-1/2)^2/r^2 and f*y^2/r^2.  At the pole
    itself the angle is undefined and the source is split evenly.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    f_val = np.asarray(f_val, dtype=float)
    dx2 = np.square(x - 0.5)
    y2 = np.square(y)
    r2 = dx2 + y2
    pole = r2 == 0.0
    safe = np.where(pole, 1.0, r2)
    f1 = np.where(x > 0.5, f_val * dx2 / safe, np.where(pole, 0.5 * f_val, 0.0))
    f2 = f_val - f1
    out1 = f1 if f1.ndim else float(f1)
    out2 = f2 if f2.ndim else float(f2)
    return out1, out2


def _overlap(lo, hi, x):
    """Length of [lo, hi] left of x, vectorized in x."""
    return np.clip(np.minimum(x, hi) - lo, 0.0, None)


@dataclass
class SourceSpec2D:
    """2D source description plus cached primitive tables per mesh.

    kind 'const' is a uniform value; 'rectangles' a union of axis-aligned
    constant patches (value, x0, y0, x1, y1); 'extruded1d' wraps a 1D source
    transported purely along x (f1 = f(x), f2 = 0), used by the
    dimensional-reduction checks.
    """

    kind: str
    value: float = 0.0
    rects: list = field(default_factory=list)
    table: str = "open"
    source_1d: SourceSpec1D | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in ("const", "rectangles", "extruded1d"):
            raise ConfigError(f"unknown 2D source kind {self.kind!r}")
        if self.kind != "extruded1d" and self.table not in _TABLES_2D:
            raise ConfigError(f"unknown table kind {self.table!r}")
        if self.kind == "rectangles" and self.table != "open":
            raise ConfigError("rectangle sources are only supported on the open table")
        if self.kind == "extruded1d" and self.source_1d is None:
            raise ConfigError("extruded1d source needs a 1D source spec")

    @classmethod
    def constant(cls, value: float, table: str = "open") -> "SourceSpec2D":
        return cls(kind="const", value=float(value), table=table)

    @classmethod
    def rectangles(cls, value: float, rects) -> "SourceSpec2D":
        return cls(kind="rectangles", value=float(value), rects=list(rects), table="open")

    @classmethod
    def extruded(cls, source_1d: SourceSpec1D) -> "SourceSpec2D":
        return cls(kind="extruded1d", source_1d=source_1d, table="open")

    # -- point evaluation ---------------------------------------------------

    def f_at(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "const":
            return np.broadcast_to(self.value, np.broadcast_shapes(x.shape, y.shape)).copy()
        if self.kind == "rectangles":
            out = np.zeros(np.broadcast_shapes(x.shape, y.shape))
            for x0, y0, x1, y1 in self.rects:
                out = out + np.where((x >= x0) & (x <= x1) & (y >= y0) & (y <= y1), self.value, 0.0)
            return out
        return np.broadcast_to(self.source_1d.f_at(x), np.broadcast_shapes(x.shape, y.shape)).copy()

    def split_at(self, x, y):
        """(f1, f2) point values under this table's ray geometry."""
        f_val = self.f_at(x, y)
        if self.kind == "extruded1d":
            return f_val, np.zeros_like(f_val)
        if self.table == "open":
            return split_open(f_val, x, y)
        return split_partial(f_val, x, y)

    # -- primitive tables ---------------------------------------------------

    def _row_segments_f1(self, y):
        """Constant segments of f1(., y) on a row, open table (exact)."""
        lo_tri = min(y, 1.0 - y)
        hi_tri = max(y, 1.0 - y)
        if self.kind == "const":
            base = [(0.0, 1.0, self.value)]
        elif self.kind == "extruded1d":
            return list(self.source_1d.segments)
        else:
            base = [(x0, x1, self.value) for x0, y0, x1, y1 in self.rects if y0 <= y <= y1]
        segs = []
        for lo, hi, val in base:
            for rlo, rhi in ((0.0, lo_tri), (hi_tri, 1.0)):
                a, b = max(lo, rlo), min(hi, rhi)
                if a < b:
                    segs.append((a, b, val))
        return segs

    def _col_segments_f2(self, x):
        """Constant segments of f2(x, .) on a column, open table (exact)."""
        lo_tri = min(x, 1.0 - x)
        hi_tri = max(x, 1.0 - x)
        if self.kind == "const":
            base = [(0.0, 1.0, self.value)]
        elif self.kind == "extruded1d":
            return []
        else:
            base = [(y0, y1, self.value) for x0, y0, x1, y1 in self.rects if x0 <= x <= x1]
        segs = []
        for lo, hi, val in base:
            for rlo, rhi in ((0.0, lo_tri), (hi_tri, 1.0)):
                a, b = max(lo, rlo), min(hi, rhi)
                if a < b:
                    segs.append((a, b, val))
        return segs

    def _build_open(self, grid: Grid2D):
        M = grid.M
        centers = grid.centers
        bx = np.zeros((M, M))
        by = np.zeros((M, M))
        bx_ghost = np.zeros(M)
        by_ghost = np.zeros(M)
        for k in range(M):
            segs = self._row_segments_f1(centers[k])
            for lo, hi, val in segs:
                bx[:, k] += val * _overlap(lo, hi, centers)
                bx_ghost[k] += val * (hi - lo)
        for i in range(M):
            segs = self._col_segments_f2(centers[i])
            for lo, hi, val in segs:
                by[i, :] += val * _overlap(lo, hi, centers)
                by_ghost[i] += val * (hi - lo)
        return bx, by, bx_ghost, by_ghost

    def _build_partial(self, grid: Grid2D, subdiv: int = 2):
        # trapezoid on a half-cell lattice; cell centers are odd nodes
        M = grid.M
        centers = grid.centers
        n_nodes = subdiv * M + 1
        nodes = np.arange(n_nodes) / (subdiv * M)
        center_idx = subdiv * np.arange(M) + subdiv // 2
        bx = np.zeros((M, M))
        by = np.zeros((M, M))
        f1_rows, _ = split_partial(self.f_at(nodes[None, :], centers[:, None]),
                                   nodes[None, :], centers[:, None])  # [row k, node]
        _, f2_cols = split_partial(self.f_at(centers[:, None], nodes[None, :]),
                                   centers[:, None], nodes[None, :])  # [col i, node]
        w = np.diff(nodes)
        cum_rows = np.concatenate(
            [np.zeros((M, 1)), np.cumsum(0.5 * w * (f1_rows[:, 1:] + f1_rows[:, :-1]), axis=1)],
            axis=1,
        )
        cum_cols = np.concatenate(
            [np.zeros((M, 1)), np.cumsum(0.5 * w * (f2_cols[:, 1:] + f2_cols[:, :-1]), axis=1)],
            axis=1,
        )
        bx[:, :] = cum_rows[:, center_idx].T
        by[:, :] = cum_cols[:, center_idx]
        bx_ghost = cum_rows[:, -1]
        by_ghost = cum_cols[:, -1]
        return bx, by, bx_ghost, by_ghost

    def tables(self, grid: Grid2D):
        """(Bx, By, Bx right-ghost per row, By top-ghost per column).

        Bx[i, k] integrates f1(., y_{k+1}) up to the cell center x_{i+1}; the
        ghost arrays carry the full-row/column integrals used by wall fluxes.
        Left/bottom ghost values are identically zero (support inside [0,1]^2).
        """
        key = grid.M
        if key not in self._cache:
            if self.kind == "rectangles":
                self._warn_rect_alignment(grid)
            if self.table == "partial" and self.kind != "extruded1d":
                self._cache[key] = self._build_partial(grid)
            else:
                self._cache[key] = self._build_open(grid)
        return self._cache[key]

    def _warn_rect_alignment(self, grid: Grid2D):
        for rect in self.rects:
            for c in rect:
                pos = c * grid.M - 0.5
                if abs(pos - round(pos)) > 1e-9:
                    print(
                        f"warning: rectangle corner {c} does not sit on a cell center "
                        f"of the M={grid.M} mesh; crest resolution degrades",
                        file=sys.stderr,
                    )
                    return
