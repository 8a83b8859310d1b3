"""Test phantoms: smooth cutoff combinations and binary letter glyphs.

Both phantoms live on [-1,1]^2 and stay supported inside the disc of
radius 0.8, which keeps every ray-transform argument compactly supported
well away from the grid boundary.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import GridError
from .fields import Grid, ScalarField, SymTensorField, VectorField

# Peak of the cutoff profile (attained at the disc center).
CUTOFF_PEAK = math.exp(-1.0)


def cutoff_eval(x, y, center, radius):
    """Smooth compactly supported bump on the disc |p - center| < radius.

    Value exp(-r^2 / (r^2 - rho^2)) inside (rho = distance to center),
    identically 0 outside; C-infinity across the rim.  Accepts scalar or
    array x, y and broadcasts.
    """
    r = float(radius)
    if not r > 0.0:
        raise GridError(f"cutoff radius must be positive, got {radius}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    rho2 = (x - center[0]) ** 2 + (y - center[1]) ** 2
    r2 = r * r
    inside = rho2 < r2
    out = np.zeros(np.broadcast(x, y).shape)
    # Guard the denominator on the outside samples; they are masked anyway.
    denom = np.where(inside, r2 - rho2, 1.0)
    np.place(out, inside, np.exp(-r2 / denom)[inside])
    return out if out.ndim else float(out)


def _cutoff_sum(grid: Grid, discs) -> np.ndarray:
    X, Y = grid.mesh()
    total = np.zeros((grid.n, grid.n))
    for (a, b), r in discs:
        total += cutoff_eval(X, Y, (a, b), r)
    return total


# Disc layouts of the smooth phantom, one list per tensor component.
_PH1_F11 = [
    ((0.0, 0.0), math.sqrt(0.05)),
    ((0.09, 0.28), math.sqrt(0.03)),
    ((-0.25, 0.15), math.sqrt(0.03)),
    ((-0.22, -0.2), math.sqrt(0.03)),
    ((0.13, -0.27), math.sqrt(0.03)),
    ((0.3, 0.0), math.sqrt(0.03)),
]
_PH1_F12 = [
    ((0.0, 0.0), math.sqrt(0.1)),
    ((0.3, 0.2), math.sqrt(0.03)),
    ((-0.3, 0.2), math.sqrt(0.03)),
]
_PH1_F22 = [
    ((0.0, 0.0), math.sqrt(0.05)),
    ((0.0, 0.3), math.sqrt(0.03)),
    ((0.0, -0.3), math.sqrt(0.03)),
    ((-0.3, 0.0), math.sqrt(0.03)),
    ((0.3, 0.0), math.sqrt(0.03)),
]


def phantom1(grid: Grid) -> SymTensorField:
    """Smooth tensor phantom: each component is a sum of cutoff bumps."""
    return SymTensorField(
        grid,
        _cutoff_sum(grid, _PH1_F11),
        _cutoff_sum(grid, _PH1_F12),
        _cutoff_sum(grid, _PH1_F22),
    )


# ---------------------------------------------------------------------
# Binary letter glyphs.  All strokes have width 0.12 and the letters fit
# the box [-0.45, 0.45]^2 (inside the radius-0.8 disc).  Rasterization is
# by cell-center inclusion, so the glyphs are exactly binary.
# ---------------------------------------------------------------------

_STROKE = 0.12


def _rect_mask(X, Y, x0, x1, y0, y1):
    return (X >= x0) & (X <= x1) & (Y >= y0) & (Y <= y1)


def _segment_mask(X, Y, p0, p1, width):
    """Points within width/2 of the segment p0-p1 (round caps)."""
    px, py = p0
    qx, qy = p1
    dx, dy = qx - px, qy - py
    L2 = dx * dx + dy * dy
    t = np.clip(((X - px) * dx + (Y - py) * dy) / L2, 0.0, 1.0)
    cx = px + t * dx
    cy = py + t * dy
    return (X - cx) ** 2 + (Y - cy) ** 2 <= (width / 2.0) ** 2


# The V keeps smooth diagonal strokes (a stepped axis-aligned V triples
# the PDE-path errors: every step corner is a derivative singularity),
# but narrower than the other letters: strokes near the +-60-degree star
# branch orientations cast long aligned shadow strips in the star data,
# and those strips -- cut at the grid edge -- set the size of the
# out-of-view reconstruction artifacts.
_V_TOP_HALFWIDTH = 0.25


def _glyph_v(X, Y):
    left = _segment_mask(X, Y, (-_V_TOP_HALFWIDTH, 0.39), (0.0, -0.39), _STROKE)
    right = _segment_mask(X, Y, (_V_TOP_HALFWIDTH, 0.39), (0.0, -0.39), _STROKE)
    return left | right


# Horizontal strokes run parallel to the star's first branch, so their
# length directly sets the amplitude of the strongest truncated shadow
# strips (the line integral along the stroke).  The bar and foot lengths
# below keep natural letter proportions while keeping those strips mild.
_L_FOOT = 0.50
_T_BAR = 0.45


def _glyph_l(X, Y):
    stem = _rect_mask(X, Y, -0.35, -0.35 + _STROKE, -0.45, 0.45)
    foot = _rect_mask(X, Y, -0.35, -0.35 + _L_FOOT, -0.45, -0.45 + _STROKE)
    return stem | foot


def _glyph_t(X, Y):
    bar = _rect_mask(X, Y, -_T_BAR / 2.0, _T_BAR / 2.0, 0.45 - _STROKE, 0.45)
    stem = _rect_mask(X, Y, -_STROKE / 2.0, _STROKE / 2.0, -0.45, 0.45 - _STROKE)
    return bar | stem


def phantom2(grid: Grid) -> SymTensorField:
    """Non-smooth tensor phantom: letters V, L, T as f11, f12, f22."""
    X, Y = grid.mesh()
    return SymTensorField(
        grid,
        _glyph_v(X, Y).astype(np.float64),
        _glyph_l(X, Y).astype(np.float64),
        _glyph_t(X, Y).astype(np.float64),
    )


def potential_scalar(grid: Grid, smooth: bool = True) -> ScalarField:
    """Scalar potential used by the potential-field recovery experiments.

    Smooth variant: the 3-bump cutoff sum (same layout as the smooth
    phantom's f12).  Non-smooth variant: the binary "V" glyph.
    """
    if smooth:
        return ScalarField(grid, _cutoff_sum(grid, _PH1_F12))
    X, Y = grid.mesh()
    return ScalarField(grid, _glyph_v(X, Y).astype(np.float64))


def potential_vector(grid: Grid, smooth: bool = True) -> VectorField:
    """Vector potential (g1, g2) for the symmetric-derivative experiments.

    Components reuse the f11/f22 layouts of the corresponding phantom:
    smooth -> (cutoff sums), non-smooth -> (letter V, letter T).
    """
    if smooth:
        return VectorField(grid, _cutoff_sum(grid, _PH1_F11), _cutoff_sum(grid, _PH1_F22))
    X, Y = grid.mesh()
    return VectorField(
        grid,
        _glyph_v(X, Y).astype(np.float64),
        _glyph_t(X, Y).astype(np.float64),
    )
