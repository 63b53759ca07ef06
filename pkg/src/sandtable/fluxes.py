"""Numerical fluxes for the two-layer system.

exchange_flux approximates the erosion/deposition rate (|u_x| - 1)v at a
vertex from one-sided slope and rolling-layer traces; transport_flux is the
interface flux of the rolling-layer transport equation with the source
primitive absorbed (-u_x v - B).  Both accept scalars or broadcastable arrays.
"""

from __future__ import annotations

import numpy as np

# relative width of the balanced-branch selection in transport_flux
BALANCE_TOL = 1e-12
# slopes below this magnitude are treated as exactly flat in transport_flux;
# the branch selection is discontinuous in the slope signs, and roundoff-scale
# slopes on genuinely flat profiles would otherwise pick branches at random
SLOPE_SNAP = 1e-12


def exchange_flux(a, b, c, d):
    """max{(max(a,0) - 1) b, (-min(c,0) - 1) d} with (a,b) / (c,d) the left/right traces.

    Zero whenever both one-sided slopes are at the critical magnitude 1, and
    nonpositive on the admissible box |a|,|c| <= 1, b,d >= 0.
    """
    left = (np.abs(np.maximum(a, 0.0)) - 1.0) * b
    right = (np.abs(np.minimum(c, 0.0)) - 1.0) * d
    return np.maximum(left, right)


def transport_flux(a, b, c, d, e1, e2):
    """Six-branch interface flux for v_t + (-u_x v - B)_x.

    Arguments are the left slope/height/primitive traces (a, b, e1) and the
    right ones (c, d, e2).  Branch selection: pure left/right upwinding when
    the slopes agree in strict sign, the characteristic-meeting formula for
    a > 0 > c, and the b-vs-d comparison on the whole closed corner
    a <= 0 <= c.  Assigning that corner's sign-boundaries to the b/d cases
    (rather than to the one-sided branches) is what makes the flux exactly
    mirror-symmetric, including on slope-free data; every input hits exactly
    one branch.  The b-vs-d selection treats heights within a few ulps of
    each other as equal: the balanced branch serves symmetric interfaces, and
    demanding bitwise equality would let one-ulp table roundoff flip
    mirror-paired interfaces onto different branches of this (discontinuous)
    selection, seeding O(1) symmetry breaking.
    """
    a, b, c, d, e1, e2 = np.broadcast_arrays(a, b, c, d, e1, e2)
    a = np.where(np.abs(a) <= SLOPE_SNAP, 0.0, a)
    c = np.where(np.abs(c) <= SLOPE_SNAP, 0.0, c)
    upwind_left = -a * b - e1
    upwind_right = -c * d - e2
    cross = (a > 0.0) & (c < 0.0)
    den = np.where(cross, c - a, 1.0)
    meeting = (-c * e1 + a * e2) / den
    balanced = -0.5 * (a * b + c * d + e1 + e2)
    near_equal = np.abs(b - d) <= BALANCE_TOL * (1.0 + np.abs(b) + np.abs(d))

    out = np.where(
        (a <= 0.0) & (c < 0.0),
        upwind_left,
        np.where(
            (a > 0.0) & (c >= 0.0),
            upwind_right,
            np.where(
                cross,
                meeting,
                np.where(
                    near_equal,
                    balanced,
                    np.where(b > d, upwind_left, upwind_right),
                ),
            ),
        ),
    )
    return out if out.ndim else float(out)


def exchange_source(alpha_left, v_left):
    """Cell source (|alpha| - 1) v from the left interface traces.

    This is the sign used by the first-order scheme and the stability
    analysis: erosion feeds v when the slope exceeds 1, deposition drains it
    below.
    """
    return (np.abs(alpha_left) - 1.0) * v_left
