"""Vertical source terms in 1D and their primitives B(x) = integral of f.

Sources are unions of constant-value intervals, which covers every experiment
in this package; primitives are then exact overlap sums, so constant sources
produce B values accurate to a couple of roundings.  That exactness is what
keeps the discrete steady states fixed points of the schemes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .grids import Grid1D


@dataclass
class SourceSpec1D:
    """Piecewise-constant source on [0, 1] with support D_f = [x1, x2].

    segments is a list of (lo, hi, value); overlapping segments add.
    """

    segments: list = field(default_factory=list)

    def __post_init__(self):
        for lo, hi, val in self.segments:
            if not (0.0 <= lo <= hi <= 1.0):
                raise ConfigError(f"source segment [{lo}, {hi}] outside [0, 1]")
            if val < 0.0:
                raise ConfigError("source must be nonnegative")

    @classmethod
    def constant(cls, value: float) -> "SourceSpec1D":
        return cls([(0.0, 1.0, float(value))])

    @property
    def support(self):
        """(x1, x2) hull of the active segments; (0, 0) for a zero source."""
        active = [(lo, hi) for lo, hi, val in self.segments if val > 0.0]
        if not active:
            return 0.0, 0.0
        return min(lo for lo, _ in active), max(hi for _, hi in active)

    def f_at(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for lo, hi, val in self.segments:
            out = out + np.where((x >= lo) & (x <= hi), val, 0.0)
        return out if out.ndim else float(out)

    def primitive(self, x):
        """B(x) = integral of f over [0, min(x, 1)], exact for the segment form."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for lo, hi, val in self.segments:
            out = out + val * np.clip(x - lo, 0.0, hi - lo)
        return out if out.ndim else float(out)

    def tables(self, grid: Grid1D):
        """(B at cell centers, B at the right ghost center x_{M+1})."""
        b_c = self.primitive(grid.centers)
        b_ghost = self.primitive(1.0)
        return b_c, float(b_ghost)
