"""Experiment drivers behind the CLI: single runs with optional per-iteration
error logging, mesh-refinement convergence tables, the single-step
well-balance table, and the single-step drift check against its closed form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracles, scheme1d, scheme2d
from .errors import ConfigError
from .grids import Grid1D, Grid2D, SchemeConfig, State1D, State2D
from .sources import SourceSpec1D
from .source2d import SourceSpec2D
from .stateio import _write_rows, save_state_1d, save_state_2d

ORACLE_KINDS = ("f1_unit", "f_half", "open2d", "partial2d")


@dataclass
class RunConfig:
    """Everything one simulation needs: discretization, scheme, source,
    duration, and output options."""

    dim: int = 1
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    M: int = 100
    t_final: float | None = None
    n_steps: int | None = None
    source_value: float = 0.5
    source_rects: list = field(default_factory=list)
    oracle: str | None = None
    outdir: str | None = None
    history: bool = False
    enforce_cfl: bool = True

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ConfigError(f"dimension must be 1 or 2, got {self.dim}")
        if self.M < 4:
            raise ConfigError(f"need at least 4 cells, got M={self.M}")
        if (self.t_final is None) == (self.n_steps is None):
            raise ConfigError("specify exactly one of t_final / n_steps")
        if self.oracle is not None and self.oracle not in ORACLE_KINDS:
            raise ConfigError(f"unknown oracle {self.oracle!r}")
        if self.source_value < 0.0:
            raise ConfigError("source value must be nonnegative")


def build_source_1d(cfg: RunConfig) -> SourceSpec1D:
    if cfg.source_rects:
        segs = [(x0, x1, cfg.source_value) for x0, x1 in cfg.source_rects]
        return SourceSpec1D(segs)
    return SourceSpec1D.constant(cfg.source_value)


def build_source_2d(cfg: RunConfig) -> SourceSpec2D:
    if cfg.source_rects:
        return SourceSpec2D.rectangles(cfg.source_value, cfg.source_rects)
    return SourceSpec2D.constant(cfg.source_value, table=cfg.scheme.table)


def exact_state(cfg: RunConfig, grid):
    if cfg.oracle is None:
        return None
    if cfg.oracle in ("f1_unit", "f_half"):
        if cfg.dim != 1:
            raise ConfigError(f"oracle {cfg.oracle} is one-dimensional")
        return oracles.sample_steady_1d(cfg.oracle, grid)
    if cfg.dim != 2:
        raise ConfigError(f"oracle {cfg.oracle} is two-dimensional")
    if cfg.oracle == "open2d":
        return oracles.sample_steady_2d_open(grid, f=cfg.source_value)
    return oracles.sample_steady_2d_partial(grid)


def run(cfg: RunConfig) -> dict:
    """Execute one configuration; write state CSVs, optional history.csv and
    report.json into cfg.outdir.  Returns the report dict."""
    if cfg.dim == 1:
        grid = Grid1D(cfg.M)
        src = build_source_1d(cfg)
        state = State1D.zeros(grid)
        norms, stepper = oracles.error_norms_1d, scheme1d.advance
    else:
        grid = Grid2D(cfg.M)
        src = build_source_2d(cfg)
        state = State2D.zeros(grid)
        norms, stepper = oracles.error_norms_2d, scheme2d.advance_2d

    exact = exact_state(cfg, grid)
    history = []

    def observer(i, t, st, theta):
        if not cfg.history:
            return
        if exact is not None:
            eu, ev = norms(st, exact, grid)
        else:
            eu = ev = float("nan")
        tmax = 0.0 if cfg.scheme.kind == "fo" else 1.0
        if theta is not None:
            tmax = float(np.max(theta))
        history.append((i, t, eu, ev, float(st.v.max()), tmax))

    state, steps, t = stepper(state, src, cfg.scheme, grid,
                              t_final=cfg.t_final, n_steps=cfg.n_steps,
                              observer=observer if cfg.history else None,
                              enforce_cfl=cfg.enforce_cfl)

    report = {
        "dim": cfg.dim,
        "scheme": cfg.scheme.kind,
        "M": cfg.M,
        "lambda": cfg.scheme.lam,
        "theta": cfg.scheme.theta,
        "table": cfg.scheme.table,
        "steps": steps,
        "t_final": t,
        "max_v": float(state.v.max()),
    }
    if exact is not None:
        eu, ev = norms(state, exact, grid)
        report["err_u_sup"] = eu
        report["err_v_l1"] = ev

    if cfg.outdir is not None:
        out = Path(cfg.outdir)
        out.mkdir(parents=True, exist_ok=True)
        if cfg.dim == 1:
            save_state_1d(state, grid, out / "u.csv", out / "v.csv")
        else:
            save_state_2d(state, grid, out / "u.csv", out / "v.csv")
        if cfg.history:
            _write_rows(out / "history.csv",
                        ["iter", "t", "err_u_sup", "err_v_l1", "max_v", "theta_max"],
                        history)
        with open(out / "report.json", "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


# -- convergence tables ------------------------------------------------------


def _restrict_u(u_ref, M_ref, M):
    if M_ref % M == 0:
        return u_ref[:: M_ref // M]
    ref_x = np.arange(M_ref + 1) / M_ref
    return np.interp(np.arange(M + 1) / M, ref_x, u_ref)


def _restrict_v(v_ref, M_ref, M):
    if M_ref % M == 0:
        r = M_ref // M
        return v_ref.reshape(M, r).mean(axis=1)
    ref_c = (np.arange(M_ref) + 0.5) / M_ref
    return np.interp((np.arange(M) + 0.5) / M, ref_c, v_ref)


def eoc_experiment_1d(meshes, t_final, lam, theta=0.5, source_value=0.5,
                      schemes=("fo", "so", "so-theta"), reference_M=None,
                      oracle=None):
    """Errors and orders over a halving mesh family.

    The reference is either a steady-state oracle or a fine second-order run;
    reference values are restricted to each test mesh by vertex subsampling /
    cell aggregation when nested, by linear interpolation otherwise.  Returns
    {scheme: list of rows (h, err_u, eoc_u, err_v, eoc_v)}.
    """
    meshes = list(meshes)
    for a, b in zip(meshes, meshes[1:]):
        if b != 2 * a:
            raise ConfigError("mesh list must halve the spacing at every level")
    if (reference_M is None) == (oracle is None):
        raise ConfigError("need exactly one of reference_M / oracle")
    src = SourceSpec1D.constant(source_value)

    ref = None
    if reference_M is not None:
        if reference_M <= max(meshes):
            raise ConfigError("reference mesh must be finer than every test mesh")
        grid_r = Grid1D(reference_M)
        cfg_r = SchemeConfig(kind="so", theta=theta, lam=lam)
        ref, _, _ = scheme1d.advance(State1D.zeros(grid_r), src, cfg_r, grid_r,
                                     t_final=t_final)

    tables = {}
    for kind in schemes:
        rows = []
        prev = None
        for M in meshes:
            grid = Grid1D(M)
            cfg = SchemeConfig(kind=kind, theta=theta, lam=lam)
            state, _, _ = scheme1d.advance(State1D.zeros(grid), src, cfg, grid,
                                           t_final=t_final)
            if ref is not None:
                exact = State1D(_restrict_u(ref.u, reference_M, M),
                                _restrict_v(ref.v, reference_M, M))
            else:
                exact = oracles.sample_steady_1d(oracle, grid)
            eu, ev = oracles.error_norms_1d(state, exact, grid)
            if prev is None:
                rows.append((grid.dx, eu, float("nan"), ev, float("nan")))
            else:
                rows.append((grid.dx, eu, oracles.eoc(prev[0], eu),
                             ev, oracles.eoc(prev[1], ev)))
            prev = (eu, ev)
        tables[kind] = rows
    return tables


def eoc_experiment_2d(meshes, t_final, lam, theta=0.5, source_value=0.5,
                      schemes=("fo", "so", "so-theta")):
    """2D convergence against the exact open-table steady state."""
    meshes = list(meshes)
    for a, b in zip(meshes, meshes[1:]):
        if b != 2 * a:
            raise ConfigError("mesh list must halve the spacing at every level")
    tables = {}
    for kind in schemes:
        rows = []
        prev = None
        for M in meshes:
            grid = Grid2D(M)
            cfg = SchemeConfig(kind=kind, theta=theta, lam=lam, table="open")
            src = SourceSpec2D.constant(source_value, table="open")
            state, _, _ = scheme2d.advance_2d(State2D.zeros(grid), src, cfg, grid,
                                              t_final=t_final)
            exact = oracles.sample_steady_2d_open(grid, f=source_value)
            eu, ev = oracles.error_norms_2d(state, exact, grid)
            if prev is None:
                rows.append((grid.h, eu, float("nan"), ev, float("nan")))
            else:
                rows.append((grid.h, eu, oracles.eoc(prev[0], eu),
                             ev, oracles.eoc(prev[1], ev)))
            prev = (eu, ev)
        tables[kind] = rows
    return tables


def write_eoc_tables(tables, outdir, stem="eoc"):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for kind, rows in tables.items():
        path = outdir / f"{stem}_{kind.replace('-', '_')}.csv"
        _write_rows(path, ["h", "err_u", "eoc_u", "err_v", "eoc_v"], rows)
        paths[kind] = path
    return paths


def wellbalance_experiment(meshes=(50, 100, 200, 400), lam=0.45, theta=0.5,
                           source_value=0.5,
                           schemes=("fo", "so", "so-theta")):
    """Single-step errors from exact steady-state samples (f = 1/2, open).

    Returns {scheme: [(dx, err_u_sup, err_v_l1), ...]}, the well-balance
    fingerprint of each scheme.
    """
    src = SourceSpec1D.constant(source_value)
    kind = "f_half" if source_value == 0.5 else None
    if kind is None:
        raise ConfigError("well-balance table is defined for the f = 1/2 source")
    out = {}
    for scheme in schemes:
        rows = []
        for M in meshes:
            grid = Grid1D(M)
            cfg = SchemeConfig(kind=scheme, theta=theta, lam=lam)
            exact = oracles.sample_steady_1d(kind, grid)
            state, _, _ = scheme1d.advance(exact.copy(), src, cfg, grid, n_steps=1)
            eu, ev = oracles.error_norms_1d(state, exact, grid)
            rows.append((grid.dx, eu, ev))
        out[scheme] = rows
    return out


def single_step_drift_check(M_values=(10, 20, 50), thetas=(0.25, 0.5),
                            lams=(0.3, 0.45)):
    """Max mismatch between the non-adaptive second-order single step from
    the unit-source steady state and its closed-form drift profile."""
    worst = 0.0
    rows = []
    for M in M_values:
        for theta in thetas:
            for lam in lams:
                grid = Grid1D(M)
                cfg = SchemeConfig(kind="so", theta=theta, lam=lam)
                src = SourceSpec1D.constant(1.0)
                start = oracles.sample_steady_1d("f1_unit", grid)
                after = scheme1d.so_step(start.copy(), src, cfg, grid, adaptive=False)
                dev = after.v - start.v
                expected = oracles.theorem_single_step_deviation(M, theta, lam)
                err_v = float(np.abs(dev - expected).max())
                err_u = float(np.abs(after.u - start.u).max())
                rows.append((M, theta, lam, err_v, err_u))
                worst = max(worst, err_v, err_u)
    return worst, rows
