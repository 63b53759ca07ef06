"""Finite-volume solvers for the two-layer sandpile growth model.

The standing layer u (vertex heights) and rolling layer v (cell averages)
evolve under a vertical source on an open or partially walled unit table.
Three schemes are provided in 1D and 2D: a first-order upwind scheme, its
MUSCL/RK2 second-order extension, and an adaptive variant that rescales the
reconstruction by a smooth steady-state indicator so discrete equilibria stay
exact fixed points.
"""

from .errors import CFLError, ConfigError
from .fluxes import exchange_flux, exchange_source, transport_flux
from .grids import (
    Grid1D,
    Grid2D,
    SchemeConfig,
    State1D,
    State2D,
    derive_alpha_1d,
    derive_alpha_beta_2d,
)
from .limiters import indicator, minmod, muscl_slope, reconstruct, slope_field
from .oracles import (
    eoc,
    error_norms_1d,
    error_norms_2d,
    sample_steady_1d,
    sample_steady_2d_open,
    sample_steady_2d_partial,
    steady_1d,
    steady_2d_open,
    steady_2d_partial,
    theorem_single_step_deviation,
)
from .scheme1d import (
    StepReport,
    advance,
    check_cfl,
    fo_step,
    rk_stage,
    so_step,
    steady_indicator_1d,
    step,
    step_report,
)
from .scheme2d import (
    advance_2d,
    check_cfl_2d,
    fo_step_2d,
    g_term_vertices,
    rk_stage_2d,
    so_step_2d,
    steady_indicator_2d,
    step_2d,
)
from .source2d import SourceSpec2D, split_open, split_partial
from .sources import SourceSpec1D

__version__ = "0.1.0"
