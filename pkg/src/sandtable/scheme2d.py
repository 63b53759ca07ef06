"""2D time stepping on the unit square: directional MUSCL reconstruction,
vertex exchange terms built from one-sided slope estimates, x/y transport
fluxes reusing the 1D interface flux, RK2 stages, and the adaptive
indicator blend.

Array layout (x first): u[iv, kv] at vertex (iv, kv); v[i, k] on cell
(i+1, k+1); alpha_e[i, kv] x-edge slopes, beta_e[iv, k] y-edge slopes.
Besides the open and partially open tables, an internal 'extruded-x'
boundary mode keeps the y direction neutral (copied boundary rows); it is
what the dimensional-reduction checks run under and is not reachable from
run configurations.
"""

from __future__ import annotations

import sys

import numpy as np

from .errors import CFLError, ConfigError
from .fluxes import transport_flux
from .grids import Grid2D, SchemeConfig, State2D, _check_state_2d, derive_alpha_beta_2d
from .limiters import indicator, reconstruct, slope_field
from .source2d import SourceSpec2D


def check_cfl_2d(state: State2D, cfg: SchemeConfig, grid: Grid2D, tol: float = 1e-12):
    dt = cfg.lam * grid.h
    max_v = float(state.v.max(initial=0.0))
    if cfg.lam * max_v > 0.5 + tol:
        raise CFLError(
            f"time-step condition lambda*max(v) <= 1/2 violated: "
            f"{cfg.lam}*{max_v:.6g} = {cfg.lam * max_v:.6g}"
        )
    if cfg.lam > 0.5 - dt + tol:
        raise CFLError(
            f"time-step condition lambda <= 1/2 - dt violated: "
            f"{cfg.lam} > {0.5 - dt:.6g}"
        )


def g_term_vertices(aL, aR, bL, bR, vxL, vxR, vyL, vyR):
    """Exchange term at vertices from one-sided slope traces and averaged
    rolling-layer traces; approximates (sqrt(u_x^2 + u_y^2) - 1) v.

    Each W pairs one directional one-sided slope with the squared upwind
    estimate of the transverse slope; the term is the max of the four.
    """
    up_aL = np.maximum(aL, 0.0)
    up_aR = np.maximum(-aR, 0.0)
    up_bL = np.maximum(bL, 0.0)
    up_bR = np.maximum(-bR, 0.0)
    tgx = np.maximum(up_aL, up_aR) ** 2
    tgy = np.maximum(up_bL, up_bR) ** 2
    wx1 = (np.sqrt(up_aL * up_aL + tgy) - 1.0) * vxL
    wx2 = (np.sqrt(up_aR * up_aR + tgy) - 1.0) * vxR
    wy1 = (np.sqrt(up_bL * up_bL + tgx) - 1.0) * vyL
    wy2 = (np.sqrt(up_bR * up_bR + tgx) - 1.0) * vyR
    return np.maximum(np.maximum(wx1, wx2), np.maximum(wy1, wy2))


def _vertex_v_traces(vxL, vxR, vyL, vyR, M):
    """Average edge traces of v to the interior vertices (M-1, M-1)."""
    vxL_v = 0.5 * (vxL[: M - 1, : M - 1] + vxL[: M - 1, 1:M])
    vxR_v = 0.5 * (vxR[1:M, : M - 1] + vxR[1:M, 1:M])
    vyL_v = 0.5 * (vyL[: M - 1, : M - 1] + vyL[1:M, : M - 1])
    vyR_v = 0.5 * (vyR[: M - 1, 1:M] + vyR[1:M, 1:M])
    return vxL_v, vxR_v, vyL_v, vyR_v


def _hx_boundary(alpha_c, v, bx_c, bx_ghost, bc_mode, col, M):
    """Boundary x-flux for column col in {0, M} (left/right)."""
    j = 0 if col == 0 else M - 1
    inner = -alpha_c[j, :] * v[j, :] - bx_c[j, :]
    if bc_mode != "partial":
        return inner
    if col == 0:
        # wall: outflow blocked when the pile rises away from it
        return np.where(alpha_c[0, :] >= 0.0, inner, 0.0)
    return np.where(alpha_c[M - 1, :] <= 0.0, inner, -bx_ghost)


def _hy_boundary(beta_c, v, by_c, by_ghost, bc_mode, row, M, x_centers):
    j = 0 if row == 0 else M - 1
    inner = -beta_c[:, j] * v[:, j] - by_c[:, j]
    if bc_mode != "partial":
        return inner
    if row == 0:
        # bottom: open for x <= 1/2, walled beyond the pole
        wall = np.where(beta_c[:, 0] >= 0.0, inner, 0.0)
        return np.where(x_centers < 0.5, inner, wall)
    return np.where(beta_c[:, M - 1] <= 0.0, inner, -by_ghost)


def _apply_u_bc(u_new, u_old, alpha_e, beta_e, grid: Grid2D, bc_mode: str):
    """Set the boundary vertex lines of u_new from the stage-input fields."""
    M, h = grid.M, grid.h
    if bc_mode == "open":
        u_new[0, :] = 0.0
        u_new[M, :] = 0.0
        u_new[:, 0] = 0.0
        u_new[:, M] = 0.0
        return
    if bc_mode == "extruded-x":
        u_new[:, 0] = u_new[:, 1]
        u_new[:, M] = u_new[:, M - 1]
        u_new[0, :] = 0.0
        u_new[M, :] = 0.0
        return
    xv = grid.vertices
    left = u_old[1, :] + h * np.maximum(alpha_e[1, :], 0.0)
    right = u_old[M - 1, :] + h * np.maximum(alpha_e[M - 2, :], 0.0)
    bottom = np.where(xv <= 0.5, 0.0, u_old[:, 1] + h * np.maximum(beta_e[:, 1], 0.0))
    top = u_old[:, M - 1] + h * np.maximum(beta_e[:, M - 2], 0.0)
    u_new[0, :] = left
    u_new[M, :] = right
    u_new[:, 0] = bottom
    u_new[:, M] = top
    u_new[0, 0] = 0.5 * (left[0] + bottom[0])
    u_new[M, 0] = 0.5 * (right[0] + bottom[M])
    u_new[0, M] = 0.5 * (left[M] + top[0])
    u_new[M, M] = 0.5 * (right[M] + top[M])


def _edge_theta(theta_cells, axis):
    """Average the per-cell indicator onto the edge lattice along axis."""
    if theta_cells is None:
        return None
    pad = [(0, 0), (0, 0)]
    pad[axis] = (1, 1)
    padded = np.pad(theta_cells, pad, mode="edge")
    if axis == 1:
        return 0.5 * (padded[:, :-1] + padded[:, 1:])
    return 0.5 * (padded[:-1, :] + padded[1:, :])


def _stage(u, v, src: SourceSpec2D, cfg: SchemeConfig, grid: Grid2D,
           limiter_theta: float, theta_cells, lam: float, bc_mode: str):
    M, h = grid.M, grid.h
    dt = lam * h
    alpha_e = (u[1:, :] - u[:-1, :]) / h
    beta_e = (u[:, 1:] - u[:, :-1]) / h
    alpha_c = 0.5 * (alpha_e[:, :-1] + alpha_e[:, 1:])
    beta_c = 0.5 * (beta_e[:-1, :] + beta_e[1:, :])
    bx_c, by_c, bx_ghost, by_ghost = src.tables(grid)

    th_c = 1.0 if theta_cells is None else theta_cells
    th_row = 1.0 if theta_cells is None else _edge_theta(theta_cells, axis=1)
    th_col = 1.0 if theta_cells is None else _edge_theta(theta_cells, axis=0)

    aeL, aeR = reconstruct(alpha_e, slope_field(alpha_e, limiter_theta, axis=0), th_row)
    beL, beR = reconstruct(beta_e, slope_field(beta_e, limiter_theta, axis=1), th_col)
    vxL, vxR = reconstruct(v, slope_field(v, limiter_theta, axis=0), th_c)
    vyL, vyR = reconstruct(v, slope_field(v, limiter_theta, axis=1), th_c)
    acL, acR = reconstruct(alpha_c, slope_field(alpha_c, limiter_theta, axis=0), th_c)
    bcL, bcR = reconstruct(beta_c, slope_field(beta_c, limiter_theta, axis=1), th_c)
    bxL, bxR = reconstruct(bx_c, slope_field(bx_c, limiter_theta, axis=0), th_c)
    byL, byR = reconstruct(by_c, slope_field(by_c, limiter_theta, axis=1), th_c)

    # exchange term at interior vertices
    vxL_v, vxR_v, vyL_v, vyR_v = _vertex_v_traces(vxL, vxR, vyL, vyR, M)
    g_int = g_term_vertices(
        aeL[: M - 1, 1:M], aeR[1:M, 1:M],
        beL[1:M, : M - 1], beR[1:M, 1:M],
        vxL_v, vxR_v, vyL_v, vyR_v,
    )
    u_new = u.copy()
    u_new[1:M, 1:M] = u[1:M, 1:M] - dt * g_int
    _apply_u_bc(u_new, u, alpha_e, beta_e, grid, bc_mode)

    # transport fluxes
    hx = np.empty((M + 1, M))
    hx[1:M, :] = transport_flux(acL[:-1, :], vxL[:-1, :], acR[1:, :], vxR[1:, :],
                                bxL[:-1, :], bxR[1:, :])
    hx[0, :] = _hx_boundary(alpha_c, v, bx_c, bx_ghost, bc_mode, 0, M)
    hx[M, :] = _hx_boundary(alpha_c, v, bx_c, bx_ghost, bc_mode, M, M)
    hy = np.empty((M, M + 1))
    hy[:, 1:M] = transport_flux(bcL[:, :-1], vyL[:, :-1], bcR[:, 1:], vyR[:, 1:],
                                byL[:, :-1], byR[:, 1:])
    hy[:, 0] = _hy_boundary(beta_c, v, by_c, by_ghost, bc_mode, 0, M, grid.centers)
    hy[:, M] = _hy_boundary(beta_c, v, by_c, by_ghost, bc_mode, M, M, grid.centers)

    grow = np.sqrt(acL * acL + bcL * bcL) - 1.0
    v_new = (
        v
        - lam * (hx[1:, :] - hx[:-1, :])
        - lam * (hy[:, 1:] - hy[:, :-1])
        + dt * grow * v
    )
    return u_new, v_new


def _resolve_bc(cfg: SchemeConfig, bc_mode):
    mode = cfg.table if bc_mode is None else bc_mode
    if mode not in ("open", "partial", "extruded-x"):
        raise ConfigError(f"unknown 2D boundary mode {mode!r}")
    return mode


def steady_indicator_2d(state: State2D, src: SourceSpec2D, cfg: SchemeConfig,
                        grid: Grid2D, bc_mode=None):
    """Per-cell indicator in [0, 1] from first-order flux residuals.

    Each vertex residual combines the raw exchange term there with the
    average flux divergence of the cells touching the vertex; each cell then
    averages the residual sums of its opposing face pairs, one pair per
    direction.  Both combinations are reflection-equivariant, so the sensor
    inherits the dihedral symmetry of the scheme (one-sided versions would
    bias it toward the lower-left).  The combined value is clamped to 1 to
    keep reconstructed interface values within the minmod bounds.
    """
    _check_state_2d(state, grid)
    mode = _resolve_bc(cfg, bc_mode)
    M, h = grid.M, grid.h
    v = state.v
    alpha_e, beta_e, alpha_c, beta_c = derive_alpha_beta_2d(state, grid)
    bx_c, by_c, bx_ghost, by_ghost = src.tables(grid)

    hx = np.empty((M + 1, M))
    hx[1:M, :] = transport_flux(alpha_c[:-1, :], v[:-1, :], alpha_c[1:, :], v[1:, :],
                                bx_c[:-1, :], bx_c[1:, :])
    hx[0, :] = _hx_boundary(alpha_c, v, bx_c, bx_ghost, mode, 0, M)
    hx[M, :] = _hx_boundary(alpha_c, v, bx_c, bx_ghost, mode, M, M)
    hy = np.empty((M, M + 1))
    hy[:, 1:M] = transport_flux(beta_c[:, :-1], v[:, :-1], beta_c[:, 1:], v[:, 1:],
                                by_c[:, :-1], by_c[:, 1:])
    hy[:, 0] = _hy_boundary(beta_c, v, by_c, by_ghost, mode, 0, M, grid.centers)
    hy[:, M] = _hy_boundary(beta_c, v, by_c, by_ghost, mode, M, M, grid.centers)

    vx_raw_L = 0.5 * (v[: M - 1, : M - 1] + v[: M - 1, 1:M])
    vx_raw_R = 0.5 * (v[1:M, : M - 1] + v[1:M, 1:M])
    vy_raw_L = 0.5 * (v[: M - 1, : M - 1] + v[1:M, : M - 1])
    vy_raw_R = 0.5 * (v[: M - 1, 1:M] + v[1:M, 1:M])
    g_full = np.zeros((M + 1, M + 1))
    g_full[1:M, 1:M] = g_term_vertices(
        alpha_e[: M - 1, 1:M], alpha_e[1:M, 1:M],
        beta_e[1:M, : M - 1], beta_e[1:M, 1:M],
        vx_raw_L, vx_raw_R, vy_raw_L, vy_raw_R,
    )

    div = (hx[1:, :] - hx[:-1, :]) + (hy[:, 1:] - hy[:, :-1])
    padded = np.pad(div, 1, mode="edge")
    div_at_vertex = 0.25 * (padded[:-1, :-1] + padded[1:, :-1]
                            + padded[:-1, 1:] + padded[1:, 1:])
    e_vertex = np.sqrt(div_at_vertex ** 2 + g_full ** 2)

    bottom = e_vertex[:-1, :-1] + e_vertex[1:, :-1]
    top = e_vertex[:-1, 1:] + e_vertex[1:, 1:]
    left = e_vertex[:-1, :-1] + e_vertex[:-1, 1:]
    right = e_vertex[1:, :-1] + e_vertex[1:, 1:]
    theta_x = indicator(0.5 * (bottom + top), h)
    theta_y = indicator(0.5 * (left + right), h)
    return np.minimum(1.0, theta_x + theta_y)


def fo_step_2d(state: State2D, src: SourceSpec2D, cfg: SchemeConfig, grid: Grid2D,
               lam: float | None = None, bc_mode=None, check: bool = True) -> State2D:
    """One first-order step: a single stage on unreconstructed values."""
    _check_state_2d(state, grid)
    if check:
        check_cfl_2d(state, cfg, grid)
    mode = _resolve_bc(cfg, bc_mode)
    u, v = _stage(state.u, state.v, src, cfg, grid, 0.0, None,
                  cfg.lam if lam is None else lam, mode)
    return State2D(u, v)


def rk_stage_2d(state: State2D, src: SourceSpec2D, cfg: SchemeConfig, grid: Grid2D,
                theta_cells=None, lam: float | None = None, bc_mode=None) -> State2D:
    _check_state_2d(state, grid)
    mode = _resolve_bc(cfg, bc_mode)
    u, v = _stage(state.u, state.v, src, cfg, grid, cfg.theta, theta_cells,
                  cfg.lam if lam is None else lam, mode)
    return State2D(u, v)


def so_step_2d(state: State2D, src: SourceSpec2D, cfg: SchemeConfig, grid: Grid2D,
               adaptive: bool, theta_cells=None, lam: float | None = None,
               bc_mode=None, check: bool = True) -> State2D:
    """One second-order step (two stages + average); adaptive reuses the
    level-n indicator in both stages."""
    _check_state_2d(state, grid)
    if check:
        check_cfl_2d(state, cfg, grid)
    mode = _resolve_bc(cfg, bc_mode)
    lam = cfg.lam if lam is None else lam
    if adaptive and theta_cells is None:
        theta_cells = steady_indicator_2d(state, src, cfg, grid, bc_mode=mode)
    elif not adaptive:
        theta_cells = None
    u1, v1 = _stage(state.u, state.v, src, cfg, grid, cfg.theta, theta_cells, lam, mode)
    u2, v2 = _stage(u1, v1, src, cfg, grid, cfg.theta, theta_cells, lam, mode)
    return State2D(0.5 * (state.u + u2), 0.5 * (state.v + v2))


def step_2d(state: State2D, src: SourceSpec2D, cfg: SchemeConfig, grid: Grid2D,
            lam: float | None = None, bc_mode=None, check: bool = True) -> State2D:
    if cfg.kind == "fo":
        return fo_step_2d(state, src, cfg, grid, lam=lam, bc_mode=bc_mode, check=check)
    return so_step_2d(state, src, cfg, grid, adaptive=(cfg.kind == "so-theta"),
                      lam=lam, bc_mode=bc_mode, check=check)


def advance_2d(state: State2D, src: SourceSpec2D, cfg: SchemeConfig, grid: Grid2D,
               t_final: float | None = None, n_steps: int | None = None,
               observer=None, bc_mode=None, enforce_cfl: bool = True):
    """Run the 2D scheme; mirrors scheme1d.advance, including the opt-out
    from halting on a violated step restriction."""
    if (t_final is None) == (n_steps is None):
        raise ConfigError("specify exactly one of t_final, n_steps")
    dt = cfg.lam * grid.h
    if n_steps is None:
        n_full = int(np.floor(t_final / dt + 1e-9))
        rem = t_final - n_full * dt
        plan = [cfg.lam] * n_full + ([rem / grid.h] if rem > 1e-12 * max(t_final, 1.0) else [])
    else:
        plan = [cfg.lam] * int(n_steps)
    t = 0.0
    warned = False
    for i, lam_i in enumerate(plan):
        try:
            check_cfl_2d(state, cfg, grid)
        except CFLError:
            if enforce_cfl:
                raise
            if not warned:
                print("warning: continuing past a violated time-step condition",
                      file=sys.stderr)
                warned = True
        theta = None
        if cfg.kind == "so-theta":
            theta = steady_indicator_2d(state, src, cfg, grid, bc_mode=bc_mode)
            state = so_step_2d(state, src, cfg, grid, adaptive=True,
                               theta_cells=theta, lam=lam_i, bc_mode=bc_mode,
                               check=False)
        else:
            state = step_2d(state, src, cfg, grid, lam=lam_i, bc_mode=bc_mode,
                            check=False)
        t += lam_i * grid.h
        if observer is not None:
            observer(i + 1, t, state, theta)
    return state, len(plan), t
