"""1D time stepping: first-order scheme, MUSCL/RK2 second-order scheme, and
the adaptive variant that rescales slopes by a steady-state indicator.

A single stage routine implements the forward-Euler building block; the
first-order step is exactly a stage with zero slopes, so the theta = 0
coincidence between the schemes holds bit for bit.  Boundary conditions for
the open and partially open table are applied inside every stage.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from .errors import CFLError, ConfigError
from .fluxes import exchange_flux, exchange_source, transport_flux
from .grids import Grid1D, SchemeConfig, State1D, _check_state_1d, derive_alpha_1d
from .limiters import indicator, reconstruct, slope_field
from .sources import SourceSpec1D


@dataclass
class StepReport:
    """Diagnostics of one accepted step."""

    dt: float
    max_v: float
    cfl1_ok: bool
    cfl2_ok: bool
    max_abs_alpha: float
    min_v: float


def check_cfl(state: State1D, cfg: SchemeConfig, grid: Grid1D, tol: float = 1e-12):
    """Raise CFLError unless lambda*max(v) <= 1/2 and lambda <= 1/2 - dt."""
    dt = cfg.lam * grid.dx
    max_v = float(state.v.max(initial=0.0))
    cfl1 = cfg.lam * max_v <= 0.5 + tol
    cfl2 = cfg.lam <= 0.5 - dt + tol
    if not cfl1:
        raise CFLError(
            f"time-step condition lambda*max(v) <= 1/2 violated: "
            f"{cfg.lam}*{max_v:.6g} = {cfg.lam * max_v:.6g}"
        )
    if not cfl2:
        raise CFLError(
            f"time-step condition lambda <= 1/2 - dt violated: "
            f"{cfg.lam} > {0.5 - dt:.6g}"
        )
    return cfl1, cfl2


def _wall_flux_right(alpha_last, v_last, b_last, b_ghost):
    return np.where(alpha_last <= 0.0, -alpha_last * v_last - b_last, -b_ghost)


def interface_fluxes_raw(alpha, v, b_c, b_ghost, table) -> np.ndarray:
    """First-order interface fluxes H_{i+1/2}, i = 0..M, from cell values.

    The end fluxes realize the v boundary conditions: open ends copy the
    first/last cell data; the partially open right wall switches on the sign
    of the last slope.
    """
    M = alpha.size
    H = np.empty(M + 1)
    H[1:M] = transport_flux(alpha[:-1], v[:-1], alpha[1:], v[1:], b_c[:-1], b_c[1:])
    H[0] = -alpha[0] * v[0] - b_c[0]
    if table == "open":
        H[M] = -alpha[-1] * v[-1] - b_c[-1]
    else:
        H[M] = _wall_flux_right(alpha[-1], v[-1], b_c[-1], b_ghost)
    return H


def g_vertices_raw(alpha, v) -> np.ndarray:
    """First-order exchange terms at all vertices; the end vertices are
    boundary-managed and carry 0."""
    M = alpha.size
    G = np.zeros(M + 1)
    G[1:M] = exchange_flux(alpha[:-1], v[:-1], alpha[1:], v[1:])
    return G


def steady_indicator_1d(state: State1D, src: SourceSpec1D, cfg: SchemeConfig, grid: Grid1D):
    """Per-cell indicator Theta in [0, 1) built from first-order flux residuals.

    Residuals use unreconstructed cell values.  Each interface contributes
    sqrt(G^2 + dH^2) with dH the backward flux difference; the missing
    exterior difference at the ends is taken as zero, keeping the sensor
    defined up to the wall.
    """
    _check_state_1d(state, grid)
    alpha = derive_alpha_1d(state, grid)
    b_c, b_ghost = src.tables(grid)
    H = interface_fluxes_raw(alpha, state.v, b_c, b_ghost, cfg.table)
    G = g_vertices_raw(alpha, state.v)
    dH = np.zeros(grid.M + 1)
    dH[1:] = H[1:] - H[:-1]
    e_iface = np.sqrt(G * G + dH * dH)
    e_cell = e_iface[:-1] + e_iface[1:]
    return indicator(e_cell, grid.dx)


def _stage(u, v, src: SourceSpec1D, cfg: SchemeConfig, grid: Grid1D,
           limiter_theta: float, theta_field, lam: float):
    """One forward-Euler stage on (u, v); returns the updated pair.

    limiter_theta = 0 reproduces the first-order update exactly.  theta_field
    (per-cell, or None for 1) rescales all slopes, implementing the adaptive
    blend; the same field must be passed to both RK stages of a step.
    """
    M = grid.M
    dx = grid.dx
    dt = lam * dx
    alpha = (u[1:] - u[:-1]) / dx
    b_c, b_ghost = src.tables(grid)

    scale = 1.0 if theta_field is None else theta_field
    d_alpha = slope_field(alpha, limiter_theta)
    d_v = slope_field(v, limiter_theta)
    d_b = slope_field(b_c, limiter_theta)
    aL, aR = reconstruct(alpha, d_alpha, scale)
    vL, vR = reconstruct(v, d_v, scale)
    bL, bR = reconstruct(b_c, d_b, scale)

    H = np.empty(M + 1)
    H[1:M] = transport_flux(aL[:-1], vL[:-1], aR[1:], vR[1:], bL[:-1], bR[1:])
    H[0] = -alpha[0] * v[0] - b_c[0]
    if cfg.table == "open":
        H[M] = -alpha[-1] * v[-1] - b_c[-1]
    else:
        H[M] = float(_wall_flux_right(alpha[-1], v[-1], b_c[-1], b_ghost))

    u_new = u.copy()
    u_new[1:M] = u[1:M] - dt * exchange_flux(aL[:-1], vL[:-1], aR[1:], vR[1:])
    u_new[0] = 0.0
    if cfg.table == "open":
        u_new[M] = 0.0
    else:
        x1, x2 = src.support
        if x2 < 1.0:
            u_new[M] = u[M - 1]
        else:
            u_new[M] = u[M - 1] + dx * max(aL[M - 2], 0.0)

    v_new = v - lam * (H[1:] - H[:-1]) + dt * exchange_source(aL, vL)
    return u_new, v_new


def fo_step(state: State1D, src: SourceSpec1D, cfg: SchemeConfig, grid: Grid1D,
            lam: float | None = None, check: bool = True) -> State1D:
    """One first-order step (single stage, unreconstructed cell values)."""
    _check_state_1d(state, grid)
    if check:
        check_cfl(state, cfg, grid)
    u, v = _stage(state.u, state.v, src, cfg, grid, 0.0, None,
                  cfg.lam if lam is None else lam)
    return State1D(u, v)


def rk_stage(state: State1D, src: SourceSpec1D, cfg: SchemeConfig, grid: Grid1D,
             theta_field=None, lam: float | None = None) -> State1D:
    """One MUSCL stage with cfg.theta slopes, optionally indicator-scaled."""
    _check_state_1d(state, grid)
    u, v = _stage(state.u, state.v, src, cfg, grid, cfg.theta, theta_field,
                  cfg.lam if lam is None else lam)
    return State1D(u, v)


def so_step(state: State1D, src: SourceSpec1D, cfg: SchemeConfig, grid: Grid1D,
            adaptive: bool, theta_field=None, lam: float | None = None,
            check: bool = True) -> State1D:
    """One second-order step: two stages and the midpoint average.

    adaptive=True computes the steady-state indicator from the time-level-n
    data and applies that same field in both stages.
    """
    _check_state_1d(state, grid)
    if check:
        check_cfl(state, cfg, grid)
    lam = cfg.lam if lam is None else lam
    if adaptive and theta_field is None:
        theta_field = steady_indicator_1d(state, src, cfg, grid)
    elif not adaptive:
        theta_field = None
    u1, v1 = _stage(state.u, state.v, src, cfg, grid, cfg.theta, theta_field, lam)
    u2, v2 = _stage(u1, v1, src, cfg, grid, cfg.theta, theta_field, lam)
    return State1D(0.5 * (state.u + u2), 0.5 * (state.v + v2))


def step(state: State1D, src: SourceSpec1D, cfg: SchemeConfig, grid: Grid1D,
         lam: float | None = None, check: bool = True) -> State1D:
    """Advance one step with the scheme selected by cfg.kind."""
    if cfg.kind == "fo":
        return fo_step(state, src, cfg, grid, lam=lam, check=check)
    return so_step(state, src, cfg, grid, adaptive=(cfg.kind == "so-theta"),
                   lam=lam, check=check)


def step_report(before: State1D, after: State1D, cfg: SchemeConfig, grid: Grid1D) -> StepReport:
    dt = cfg.lam * grid.dx
    return StepReport(
        dt=dt,
        max_v=float(before.v.max()),
        cfl1_ok=bool(cfg.lam * before.v.max() <= 0.5 + 1e-12),
        cfl2_ok=bool(cfg.lam <= 0.5 - dt + 1e-12),
        max_abs_alpha=float(np.abs(derive_alpha_1d(after, grid)).max()),
        min_v=float(after.v.min()),
    )


def advance(state: State1D, src: SourceSpec1D, cfg: SchemeConfig, grid: Grid1D,
            t_final: float | None = None, n_steps: int | None = None,
            observer=None, enforce_cfl: bool = True):
    """Run the configured scheme for n_steps or up to t_final (exact landing:
    a shorter final step closes any remainder).  observer(i, t, state, theta)
    is called after each step when given.  With enforce_cfl=False a violated
    step restriction warns once instead of halting, which reproduces
    experiments that run at the published parameters past the sufficient
    bound.  Returns (state, steps, t)."""
    if (t_final is None) == (n_steps is None):
        raise ConfigError("specify exactly one of t_final, n_steps")
    dt = cfg.lam * grid.dx
    if n_steps is None:
        n_full = int(np.floor(t_final / dt + 1e-9))
        rem = t_final - n_full * dt
        plan = [cfg.lam] * n_full + ([rem / grid.dx] if rem > 1e-12 * max(t_final, 1.0) else [])
    else:
        plan = [cfg.lam] * int(n_steps)
    t = 0.0
    warned = False
    for i, lam_i in enumerate(plan):
        try:
            check_cfl(state, cfg, grid)
        except CFLError:
            if enforce_cfl:
                raise
            if not warned:
                print("warning: continuing past a violated time-step condition",
                      file=sys.stderr)
                warned = True
        theta = None
        if cfg.kind == "so-theta":
            theta = steady_indicator_1d(state, src, cfg, grid)
            state = so_step(state, src, cfg, grid, adaptive=True,
                            theta_field=theta, lam=lam_i, check=False)
        else:
            state = step(state, src, cfg, grid, lam=lam_i, check=False)
        t += lam_i * grid.dx
        if observer is not None:
            observer(i + 1, t, state, theta)
    return state, len(plan), t
