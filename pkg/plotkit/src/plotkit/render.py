"""Build figures from solver CSV files.

This package never recomputes numerics: it draws exactly what the CSVs
contain (1D profiles with optional exact-solution overlays and a zoom inset,
error-versus-iteration histories on a log axis, and surface/contour views of
2D fields).  Figure construction is split from saving so tests can inspect
the artists.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("line1d", "errhist", "surface2d", "contour2d")


class RenderError(ValueError):
    """Bad figure request: unknown kind, unreadable CSV, missing column."""


def read_csv_columns(path, required=None):
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = [h.strip() for h in next(reader)]
            except StopIteration:
                raise RenderError(f"{path}: empty CSV") from None
            rows = [row for row in reader if row]
    except OSError as exc:
        raise RenderError(f"{path}: {exc}") from None
    if required:
        missing = [c for c in required if c not in header]
        if missing:
            raise RenderError(f"{path}: missing column(s) {', '.join(missing)}")
    if not rows:
        raise RenderError(f"{path}: no data rows")
    data = np.array([[float(x) for x in row] for row in rows])
    return {name: data[:, j] for j, name in enumerate(header)}


def _field_column(cols, path):
    for name in ("u", "v"):
        if name in cols:
            return name
    raise RenderError(f"{path}: missing column(s) u or v")


def _grid_2d(cols, path):
    x, y = cols["x"], cols["y"]
    nx = np.unique(x).size
    ny = np.unique(y).size
    if nx * ny != x.size:
        raise RenderError(f"{path}: rows do not form a full x-y grid")
    return x.reshape(nx, ny), y.reshape(nx, ny)


def build_line1d(inputs, oracle=None, inset=None):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    name = "field"
    for path in inputs:
        cols = read_csv_columns(path, required=["x"])
        name = _field_column(cols, path)
        ax.plot(cols["x"], cols[name], lw=1.5, label=f"{name} ({Path(path).stem})")
    if oracle is not None:
        cols = read_csv_columns(oracle, required=["x"])
        oname = _field_column(cols, oracle)
        ax.plot(cols["x"], cols[oname], "k--", lw=1.0, label="exact")
    ax.set_xlabel("x")
    ax.set_ylabel(name)
    ax.legend(loc="best", fontsize=8)
    if inset is not None:
        x0, x1 = inset
        axin = ax.inset_axes([0.55, 0.55, 0.4, 0.4])
        for line in ax.get_lines():
            xs, ys = line.get_data()
            sel = (xs >= x0) & (xs <= x1)
            axin.plot(xs[sel], ys[sel], lw=line.get_linewidth(),
                      ls=line.get_linestyle(), color=line.get_color())
        axin.set_xlim(x0, x1)
        ax.indicate_inset_zoom(axin, edgecolor="gray")
    return fig, {"kind": "line1d", "curves": len(ax.get_lines())}


def build_errhist(inputs):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for path in inputs:
        cols = read_csv_columns(path, required=["iter", "err_u_sup", "err_v_l1"])
        if not (np.isfinite(cols["err_u_sup"]).all()
                and np.isfinite(cols["err_v_l1"]).all()):
            raise RenderError(f"{path}: error columns contain non-finite values "
                              "(was the run configured with an oracle?)")
        ax.semilogy(cols["iter"], cols["err_u_sup"], lw=1.2,
                    label=f"sup u-error ({Path(path).stem})")
        ax.semilogy(cols["iter"], cols["err_v_l1"], lw=1.2, ls="--",
                    label=f"L1 v-error ({Path(path).stem})")
    ax.set_xlabel("iteration")
    ax.set_ylabel("error")
    ax.legend(loc="best", fontsize=8)
    return fig, {"kind": "errhist", "curves": len(ax.get_lines())}


def build_surface2d(inputs):
    (path,) = inputs
    cols = read_csv_columns(path, required=["x", "y"])
    name = _field_column(cols, path)
    xg, yg = _grid_2d(cols, path)
    zg = cols[name].reshape(xg.shape)
    fig = plt.figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot(projection="3d")
    ax.plot_surface(xg, yg, zg, cmap="viridis", linewidth=0, antialiased=False)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel(name)
    return fig, {"kind": "surface2d"}


def build_contour2d(inputs, contours=40):
    if contours < 2:
        raise RenderError(f"need at least 2 contour levels, got {contours}")
    (path,) = inputs
    cols = read_csv_columns(path, required=["x", "y"])
    name = _field_column(cols, path)
    xg, yg = _grid_2d(cols, path)
    zg = cols[name].reshape(xg.shape)
    lo, hi = float(zg.min()), float(zg.max())
    if hi <= lo:
        hi = lo + 1.0
    levels = np.linspace(lo, hi, contours)
    fig, ax = plt.subplots(figsize=(5.6, 5.0))
    cs = ax.contour(xg, yg, zg, levels=levels, linewidths=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    fig.colorbar(cs.collections[0] if hasattr(cs, "collections") else cs,
                 ax=ax, shrink=0.85)
    return fig, {"kind": "contour2d", "n_levels": len(cs.levels)}


def render(kind, inputs, out, oracle=None, contours=40, inset=None):
    """Render one figure of the given kind to `out`; returns an info dict."""
    if kind not in KINDS:
        raise RenderError(f"unknown figure kind {kind!r} (choose from {', '.join(KINDS)})")
    if not inputs:
        raise RenderError("no input CSV given")
    if kind == "line1d":
        fig, info = build_line1d(inputs, oracle=oracle, inset=inset)
    elif kind == "errhist":
        fig, info = build_errhist(inputs)
    elif kind == "surface2d":
        fig, info = build_surface2d(inputs)
    else:
        fig, info = build_contour2d(inputs, contours=contours)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=110, metadata={"Software": "plotkit"})
    plt.close(fig)
    info["out"] = str(out)
    return info
