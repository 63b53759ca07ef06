"""Closed-form steady states, error norms, the experimental order of
convergence, and the closed-form single-step drift of the non-adaptive
second-order scheme started from the unit-source steady state.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .grids import Grid1D, Grid2D, State1D, State2D

STEADY_KINDS_1D = ("f1_unit", "f_half")


def steady_1d(kind: str, x):
    """Steady pile (u, v) on the open unit interval for f = 1 or f = 0.5.

    u is the tent min(x, 1-x); v ramps linearly away from the crest with the
    source rate, v = f * |x - 1/2|.
    """
    if kind not in STEADY_KINDS_1D:
        raise ConfigError(f"unknown steady-state kind {kind!r}")
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)):
        raise ConfigError("steady state is defined on [0, 1] only")
    f = 1.0 if kind == "f1_unit" else 0.5
    u = np.minimum(x, 1.0 - x)
    v = f * np.abs(x - 0.5)
    return u, v


def sample_steady_1d(kind: str, grid: Grid1D) -> State1D:
    """Discrete steady state: u at vertices, v point-sampled at cell centers."""
    u, _ = steady_1d(kind, grid.vertices)
    _, v = steady_1d(kind, grid.centers)
    return State1D(u, v)


def steady_2d_open(x, y, f: float = 0.5):
    """Steady pile on the fully open unit square with constant source f.

    u is the pyramid distance-to-boundary; along each transport ray v grows
    from zero at the ridge at rate f, which evaluates to f times the gap
    between the two smallest of (x, 1-x, y, 1-y).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    vals = np.stack(np.broadcast_arrays(x, 1.0 - x, y, 1.0 - y))
    part = np.sort(vals, axis=0)
    u = part[0]
    v = f * (part[1] - part[0])
    return u, v


def sample_steady_2d_open(grid: Grid2D, f: float = 0.5) -> State2D:
    xv = grid.vertices[:, None]
    yv = grid.vertices[None, :]
    u, _ = steady_2d_open(xv, yv, f)
    xc = grid.centers[:, None]
    yc = grid.centers[None, :]
    _, v = steady_2d_open(xc, yc, f)
    return State2D(u, v)


def steady_2d_partial(x, y):
    """Steady pile on the square walled except the bottom segment left of 1/2.

    u is the distance to the open segment; right of the pole (1/2, 0) every
    transport ray passes through the pole and v integrates the source
    radially between the point and the far wall, (l^2 - d^2)/(2d) with l the
    ray length to the wall.  v is singular at the pole itself.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    bx, by = np.broadcast_arrays(x, y)
    if np.any((bx == 0.5) & (by == 0.0)):
        raise ConfigError("v is singular at the pole (1/2, 0)")
    dx = bx - 0.5
    d = np.hypot(dx, by)
    left = bx <= 0.5
    u = np.where(left, by, d)
    safe_dx = np.where(dx > 0.0, dx, 1.0)
    safe_y = np.where(by > 0.0, by, 1.0)
    steep = np.where(dx > 0.0, by / safe_dx, np.inf)
    l_shallow = np.sqrt(0.25 + np.square(0.5 * by / safe_dx))
    l_steep = np.sqrt(1.0 + np.square(dx / safe_y))
    ell = np.where(steep <= 2.0, l_shallow, l_steep)
    v_right = (ell * ell - d * d) / (2.0 * np.where(d > 0.0, d, 1.0))
    v = np.where(left, 1.0 - by, v_right)
    if v.ndim == 0:
        return float(u), float(v)
    return u, v


def sample_steady_2d_partial(grid: Grid2D) -> State2D:
    """Vertex samples of u (defined everywhere, including the pole vertex)
    and cell-center samples of v (centers never hit the pole)."""
    xv = grid.vertices[:, None]
    yv = grid.vertices[None, :]
    dxv = xv - 0.5
    u = np.where(xv <= 0.5, yv + 0.0 * xv, np.hypot(dxv, yv + 0.0 * xv))
    xc = grid.centers[:, None]
    yc = grid.centers[None, :]
    _, v = steady_2d_partial(xc, np.broadcast_to(yc, (grid.M, grid.M)))
    return State2D(u, v)


def error_norms_1d(state: State1D, exact: State1D, grid: Grid1D):
    """(sup error in u over vertices, L1 error in v over cells)."""
    sup_u = float(np.abs(state.u - exact.u).max())
    l1_v = float(np.abs(state.v - exact.v).sum() * grid.dx)
    return sup_u, l1_v


def error_norms_2d(state: State2D, exact: State2D, grid: Grid2D):
    sup_u = float(np.abs(state.u - exact.u).max())
    l1_v = float(np.abs(state.v - exact.v).sum() * grid.h * grid.h)
    return sup_u, l1_v


def eoc(err_coarse: float, err_fine: float) -> float:
    """log2 of the error drop under one mesh halving."""
    if err_coarse <= 0.0 or err_fine <= 0.0:
        raise ConfigError("EOC needs strictly positive errors")
    return float(np.log2(err_coarse / err_fine))


def theorem_single_step_deviation(M: int, theta: float, lam: float) -> np.ndarray:
    """Per-cell drift v^1 - v^0 of one non-adaptive second-order step started
    from the discrete steady state of the unit source (crest on the middle
    vertex).  Derived by carrying the reconstruction and both stages through
    by hand; the profile is symmetric about the crest interface.

    Returns an array over cells 1..M (index 0 is cell 1).  M must be even
    and large enough that the six affected cells are interior.
    """
    if M % 2 != 0:
        raise ConfigError("the crest must sit on a vertex: M must be even")
    if M < 10:
        raise ConfigError("need M >= 10 so the affected cells are interior")
    dx = 1.0 / M
    dt = lam * dx
    K = M // 2
    dev = np.zeros(M)
    inner = theta / 2.0 * (dt - lam * (dt - dx))
    ring1 = theta / 2.0 * (-dt - lam * (dx - 2.0 * dt - 2.0 * theta * dt))
    ring2 = theta / 2.0 * (-lam * (dt + 2.0 * theta * dt))
    # 1-based cells K-2 .. K+3 map to 0-based K-3 .. K+2
    dev[K - 3] = ring2
    dev[K - 2] = ring1
    dev[K - 1] = inner
    dev[K] = inner
    dev[K + 1] = ring1
    dev[K + 2] = ring2
    return dev
