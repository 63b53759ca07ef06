"""Minmod limiter, MUSCL slopes, interface reconstruction, and the smooth
steady-state indicator used to blend the second-order scheme back to first
order near equilibrium.
"""

from __future__ import annotations

import numpy as np


def minmod(*args):
    """Smallest-magnitude argument when all share one strict sign, else 0.

    Any zero argument forces the result to 0 (sgn(0) matches no strict sign),
    so limited slopes vanish at extrema.  Accepts scalars or broadcastable
    arrays.
    """
    if not args:
        raise TypeError("minmod needs at least one argument")
    arrs = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
    stacked = np.stack(arrs)
    all_pos = np.all(stacked > 0.0, axis=0)
    all_neg = np.all(stacked < 0.0, axis=0)
    out = np.where(all_pos, stacked.min(axis=0), np.where(all_neg, stacked.max(axis=0), 0.0))
    return out if out.ndim else float(out)


def muscl_slope(z_prev, z_mid, z_next, theta):
    """Limited slope 2*theta*minmod(forward, centered, backward); 0 when theta=0."""
    return 2.0 * theta * minmod(z_mid - z_prev, 0.5 * (z_next - z_prev), z_next - z_mid)


def slope_field(z: np.ndarray, theta: float, axis: int = 0) -> np.ndarray:
    """Per-cell limited slopes along ``axis`` with the first and last cells
    forced to zero (no ghost data is ever stored)."""
    z = np.asarray(z, dtype=float)
    dz = np.zeros_like(z)
    if theta == 0.0 or z.shape[axis] < 3:
        return dz
    zm = np.moveaxis(z, axis, 0)
    out = np.moveaxis(dz, axis, 0)
    out[1:-1] = muscl_slope(zm[:-2], zm[1:-1], zm[2:], theta)
    return dz


def reconstruct(z, dz, theta_scale=1.0):
    """Edge values (z + theta*dz/2, z - theta*dz/2) of the in-cell linear profile.

    The first entry is the trace at the cell's right edge (the 'L' state of
    interface i+1/2), the second the trace at its left edge (the 'R' state of
    interface i-1/2).  theta_scale in [0, 1] is the steady-state indicator;
    1 gives the plain MUSCL values and 0 collapses to the cell average.
    """
    half = 0.5 * theta_scale * np.asarray(dz, dtype=float)
    return z + half, z - half


def indicator(residual, mesh_size):
    """Smooth sensor r^2 / (r^2 + mesh^2): 0 at equilibrium, -> 1 for residuals
    that dominate the mesh size."""
    r2 = np.square(residual)
    return r2 / (r2 + mesh_size * mesh_size)
