"""Uniform grids on the unit interval / unit square and discrete solution fields.

The standing layer u lives on cell vertices, the rolling layer v is a cell
average.  Vertices are computed as i/M (a single rounded division per node,
never cumulative addition) so the endpoints are exactly 0 and 1 and, for even
M, the midpoint vertex is exactly 0.5.  Steady-state tests rely on the crest
sitting exactly on a vertex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

SCHEME_KINDS = ("fo", "so", "so-theta")
TABLE_KINDS = ("open", "partial")


class Grid1D:
    """Uniform mesh of M cells on [0, 1]; vertices x_{i+1/2} = i/M."""

    def __init__(self, M: int):
        if M < 4:
            raise ConfigError(f"need at least 4 cells, got M={M}")
        self.M = int(M)
        self.dx = 1.0 / self.M
        self.vertices = np.arange(self.M + 1) / self.M
        self.centers = 0.5 * (self.vertices[:-1] + self.vertices[1:])

    def __repr__(self):
        return f"Grid1D(M={self.M})"


class Grid2D:
    """Uniform M x M Cartesian mesh on the unit square with h = 1/M."""

    def __init__(self, M: int):
        if M < 4:
            raise ConfigError(f"need at least 4 cells per axis, got M={M}")
        self.M = int(M)
        self.h = 1.0 / self.M
        self.vertices = np.arange(self.M + 1) / self.M
        self.centers = 0.5 * (self.vertices[:-1] + self.vertices[1:])

    def __repr__(self):
        return f"Grid2D(M={self.M})"


@dataclass
class State1D:
    """Discrete 1D solution: u at the M+1 vertices, v averaged over the M cells.

    v[i] stores the average over cell i+1 in 1-based cell numbering (the cell
    between vertices i and i+1); there is no cell 0.
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.u.ndim != 1 or self.v.ndim != 1 or self.u.size != self.v.size + 1:
            raise ConfigError(
                f"state shapes u{self.u.shape} / v{self.v.shape} are not vertex/cell arrays"
            )

    def copy(self) -> "State1D":
        return State1D(self.u.copy(), self.v.copy())

    @classmethod
    def zeros(cls, grid: Grid1D) -> "State1D":
        return cls(np.zeros(grid.M + 1), np.zeros(grid.M))


@dataclass
class State2D:
    """Discrete 2D solution: u on the (M+1)^2 vertices, v on the M^2 cells.

    Index convention: first axis is x, second is y, so u[i, k] approximates
    u(x_{i+1/2}, y_{k+1/2}) and v[i, k] the average over the cell with center
    (x_{i+1}, y_{k+1}) in 1-based cell numbering.
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.u.ndim != 2 or self.v.ndim != 2:
            raise ConfigError("2D state fields must be 2D arrays")
        n = self.u.shape[0]
        if self.u.shape != (n, n) or self.v.shape != (n - 1, n - 1):
            raise ConfigError(
                f"state shapes u{self.u.shape} / v{self.v.shape} are not vertex/cell grids"
            )

    def copy(self) -> "State2D":
        return State2D(self.u.copy(), self.v.copy())

    @classmethod
    def zeros(cls, grid: Grid2D) -> "State2D":
        return cls(np.zeros((grid.M + 1, grid.M + 1)), np.zeros((grid.M, grid.M)))


@dataclass
class SchemeConfig:
    """Numerical scheme selection: kind, limiter parameter, CFL ratio, table."""

    kind: str = "so-theta"
    theta: float = 0.5
    lam: float = 0.45
    table: str = "open"

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ConfigError(f"unknown scheme kind {self.kind!r}")
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigError(f"limiter parameter theta={self.theta} outside [0, 1]")
        if self.lam <= 0.0:
            raise ConfigError(f"time-step ratio lambda={self.lam} must be positive")
        if self.table not in TABLE_KINDS:
            raise ConfigError(f"unknown table kind {self.table!r}")


def _check_state_1d(state: State1D, grid: Grid1D):
    if state.u.size != grid.M + 1:
        raise ConfigError(f"state has {state.u.size - 1} cells, grid has {grid.M}")


def _check_state_2d(state: State2D, grid: Grid2D):
    if state.u.shape[0] != grid.M + 1:
        raise ConfigError(f"state has {state.u.shape[0] - 1} cells per axis, grid has {grid.M}")


def derive_alpha_1d(state: State1D, grid: Grid1D) -> np.ndarray:
    """Cell slopes alpha_i = (u_{i+1/2} - u_{i-1/2}) / dx, length M."""
    _check_state_1d(state, grid)
    return (state.u[1:] - state.u[:-1]) / grid.dx


def derive_alpha_beta_2d(state: State2D, grid: Grid2D):
    """Edge slopes of u and their cell-center averages.

    Returns (alpha_e, beta_e, alpha_c, beta_c) where alpha_e[i, kv] is the
    x-difference across cell column i+1 along vertex row kv, beta_e[iv, k] the
    y-difference along vertex column iv, and the *_c arrays average the two
    edges bounding each cell.
    """
    _check_state_2d(state, grid)
    u = state.u
    alpha_e = (u[1:, :] - u[:-1, :]) / grid.h
    beta_e = (u[:, 1:] - u[:, :-1]) / grid.h
    alpha_c = 0.5 * (alpha_e[:, :-1] + alpha_e[:, 1:])
    beta_c = 0.5 * (beta_e[:-1, :] + beta_e[1:, :])
    return alpha_e, beta_e, alpha_c, beta_c
