"""Finite-difference differential operators and axis-aligned ray integrals.

Derivatives use central differences at interior samples and first-order
one-sided differences on the boundary ring (numpy.gradient with
edge_order=1).  Axis integrals are midpoint-rule half-ray sums: the
starting cell contributes half a step, everything beyond the grid is
taken as zero.
"""

from __future__ import annotations

import numpy as np

from .errors import GridError
from .fields import Direction, Grid, ScalarField, SymTensorField, VectorField


def _partials(values: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    return np.gradient(values, h, h, edge_order=1)


def gradient(phi: ScalarField) -> VectorField:
    """d(phi) = (d1 phi, d2 phi)."""
    gx, gy = _partials(phi.values, phi.grid.h)
    return VectorField(phi.grid, gx, gy)


def dir_deriv(phi: ScalarField, d: Direction) -> ScalarField:
    """Directional derivative D_d phi = d1*d1phi + d2*d2phi."""
    gx, gy = _partials(phi.values, phi.grid.h)
    return ScalarField(phi.grid, d.d1 * gx + d.d2 * gy)


def sym_deriv(g: VectorField) -> SymTensorField:
    """Symmetric derivative: (dg)_ij = (d_i g_j + d_j g_i) / 2."""
    h = g.grid.h
    g1x, g1y = _partials(g.g1, h)
    g2x, g2y = _partials(g.g2, h)
    return SymTensorField(g.grid, g1x, 0.5 * (g1y + g2x), g2y)


def perp_sym_deriv(g: VectorField) -> SymTensorField:
    """Perpendicular symmetric derivative d-perp of a vector field.

    Componentwise: f11 = -d2 g1, f12 = (d1 g1 - d2 g2)/2, f22 = d1 g2.
    """
    h = g.grid.h
    g1x, g1y = _partials(g.g1, h)
    g2x, g2y = _partials(g.g2, h)
    return SymTensorField(g.grid, -g1y, 0.5 * (g1x - g2y), g2x)


def d2(phi: ScalarField) -> SymTensorField:
    """d^2 phi = sym_deriv(gradient(phi)) — the Hessian, symmetrized stencils."""
    return sym_deriv(gradient(phi))


def dperp2(phi: ScalarField) -> SymTensorField:
    """(d-perp)^2 phi = perp_sym_deriv of d-perp phi = (-d2 phi, d1 phi).

    Analytically (d22 phi, -d12 phi, d11 phi).
    """
    gx, gy = _partials(phi.values, phi.grid.h)
    return perp_sym_deriv(VectorField(phi.grid, -gy, gx))


def ddperp(phi: ScalarField) -> SymTensorField:
    """Mixed operator d d-perp phi, symmetrized as (d(dperp phi) + dperp(d phi))/2.

    Analytically (-d12 phi, (d11 - d22) phi / 2, d12 phi); the two
    finite-difference compositions differ at the boundary ring, averaging
    keeps the operator symmetric under the x<->y reflection.
    """
    gx, gy = _partials(phi.values, phi.grid.h)
    a = sym_deriv(VectorField(phi.grid, -gy, gx))
    b = perp_sym_deriv(VectorField(phi.grid, gx, gy))
    return SymTensorField(
        phi.grid,
        0.5 * (a.f11 + b.f11),
        0.5 * (a.f12 + b.f12),
        0.5 * (a.f22 + b.f22),
    )


_AXES = {"+e1": (0, +1), "-e1": (0, -1), "+e2": (1, +1), "-e2": (1, -1)}


def axis_integral(f: ScalarField, axis: str) -> ScalarField:
    """Half-ray integral along a coordinate axis, midpoint rule.

    axis "+e1" integrates rightward: out[i,j] = h*(f[i,j]/2 + sum_{k>i} f[k,j]);
    "-e1" leftward, "+e2" upward, "-e2" downward.  The field is taken as
    zero outside the grid, so rays truncate at the boundary exactly.
    """
    try:
        ax, sign = _AXES[axis]
    except KeyError:
        raise GridError(f"unknown axis {axis!r}, expected one of {sorted(_AXES)}") from None
    v = f.values
    if ax == 1:
        v = v.T
    if sign > 0:
        suffix = np.cumsum(v[::-1], axis=0)[::-1]
    else:
        suffix = np.cumsum(v, axis=0)
    out = f.grid.h * (suffix - 0.5 * v)
    if ax == 1:
        out = out.T
    return ScalarField(f.grid, out)
