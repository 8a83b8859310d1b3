"""Constant-coefficient second-order solvers on the cell-center grid.

All three solvers treat the equation

    a * u_xx + b * u_yy = -source        on [-extent, extent]^2

discretized at the same cell centers the fields live on:

* elliptic (a*b > 0): 5-point finite differences, zero Dirichlet values on
  the outermost cell ring, interior unknowns solved as one sparse SPD
  system (direct factorization; the contract is the residual bound
  ||A u - F||_inf <= 1e-8 ||F||_inf, not the algorithm).
* parabolic (exactly one of a, b vanishes): the equation degenerates to
  u_ss = -source/coef along one axis; integrate twice along that axis
  with the half-ray midpoint rule (u -> 0 toward +infinity).
* hyperbolic (a*b < 0): explicit second-order marching in the time-like
  axis from two initial columns, with optional grid refinement along the
  marching axis to satisfy the Courant bound sqrt(lambda) <= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .calculus import axis_integral
from .errors import CFLError, ClassificationError, SolveError
from .fields import Grid, ScalarField

_KIND_TOL = 1e-12
_RESIDUAL_REL = 1e-8


@dataclass(frozen=True)
class SecondOrderProblem:
    """a u_xx + b u_yy = -source, with kind classification by coefficient signs."""

    grid: Grid
    a: float
    b: float
    source: ScalarField
    tol: float = _KIND_TOL

    def __post_init__(self):
        if self.source.grid != self.grid:
            raise ClassificationError("problem source must live on the problem grid")

    @property
    def kind(self) -> str:
        a0 = abs(self.a) <= self.tol
        b0 = abs(self.b) <= self.tol
        if a0 and b0:
            raise ClassificationError(f"degenerate problem: a={self.a}, b={self.b}")
        if a0 or b0:
            return "parabolic"
        return "elliptic" if self.a * self.b > 0.0 else "hyperbolic"


def _require(problem: SecondOrderProblem, kind: str) -> None:
    got = problem.kind
    if got != kind:
        raise ClassificationError(f"problem is {got}, solver expects {kind}")


def solve_elliptic(problem: SecondOrderProblem) -> ScalarField:
    """Zero-Dirichlet 5-point solve of an elliptic problem."""
    _require(problem, "elliptic")
    a, b = problem.a, problem.b
    src = problem.source.values
    if a < 0.0:  # normalize to positive-definite orientation
        a, b, src = -a, -b, -src
    n = problem.grid.n
    h = problem.grid.h
    m = n - 2
    k1 = sp.diags_array((-np.ones(m - 1), 2.0 * np.ones(m), -np.ones(m - 1)), offsets=(-1, 0, 1))
    eye = sp.eye_array(m)
    A = (a * sp.kron(k1, eye) + b * sp.kron(eye, k1)).tocsr()
    F = (h * h) * src[1:-1, 1:-1].ravel()
    U = spla.spsolve(A, F)
    scale = np.abs(F).max()
    resid = np.abs(A @ U - F).max()
    if scale > 0.0 and resid > _RESIDUAL_REL * scale:
        raise SolveError(f"elliptic residual {resid:.3e} exceeds {_RESIDUAL_REL:g} * {scale:.3e}")
    out = np.zeros((n, n))
    out[1:-1, 1:-1] = U.reshape(m, m)
    return ScalarField(problem.grid, out)


def solve_parabolic(problem: SecondOrderProblem) -> ScalarField:
    """Degenerate-axis double integration: u = X X (-source/coef)."""
    _require(problem, "parabolic")
    if abs(problem.b) <= problem.tol:
        coef, axis = problem.a, "+e1"
    else:
        coef, axis = problem.b, "+e2"
    rhs = ScalarField(problem.grid, -problem.source.values / coef)
    return axis_integral(axis_integral(rhs, axis), axis)


def _resample_axis0(values: np.ndarray, pos: np.ndarray) -> np.ndarray:
    """Linear interpolation of values[i, :] at fractional indices pos (clamped)."""
    s = np.clip(pos, 0.0, values.shape[0] - 1.0)
    i0 = np.minimum(s.astype(int), values.shape[0] - 2)
    w = (s - i0)[:, None]
    return (1.0 - w) * values[i0, :] + w * values[i0 + 1, :]


def solve_hyperbolic(
    problem: SecondOrderProblem,
    initial_g: np.ndarray | None = None,
    initial_gx: np.ndarray | None = None,
    refine: int = 4,
) -> ScalarField:
    """Explicit march of a u_xx - |b| u_yy = -source from the x = -extent side.

    initial_g / initial_gx are the values of u and its marching-axis
    derivative on the initial line (length-n arrays over the transverse
    axis; zero by default).  The mirrored case a < 0 < b is handled by
    swapping the axes, so the initial line is then y = -extent and the
    initial data runs over x.  The marching axis is refined `refine`-fold
    (linear interpolation both ways); a Courant number above 1 raises
    CFLError naming the refinement that would fix it.
    """
    _require(problem, "hyperbolic")
    if refine < 1:
        raise ClassificationError(f"refine must be >= 1, got {refine}")
    a, b = problem.a, problem.b
    src = problem.source.values
    swapped = a < 0.0
    if swapped:  # time-like axis is y; transpose into the canonical layout
        a, b = b, a
        src = src.T
    btilde = -b
    n = problem.grid.n
    h = problem.grid.h
    hx = h / refine
    lam = (btilde / a) * (hx * hx) / (h * h)
    if math.sqrt(lam) > 1.0 + 1e-12:
        need = math.ceil(math.sqrt(btilde / a))
        raise CFLError(
            f"Courant number {math.sqrt(lam):.3f} > 1 at refine={refine}; need refine >= {need}"
        )
    g = np.zeros(n) if initial_g is None else np.asarray(initial_g, dtype=float)
    gx = np.zeros(n) if initial_gx is None else np.asarray(initial_gx, dtype=float)
    if g.shape != (n,) or gx.shape != (n,):
        raise ClassificationError("initial data must be length-n arrays")

    nf = n * refine
    # fine marching-axis centers expressed in coarse fractional indices
    fine_pos = (np.arange(nf) + 0.5) / refine - 0.5
    src_fine = _resample_axis0(src, fine_pos)

    u = np.empty((nf, n))
    u[0, :] = g
    u[1, :] = g + hx * gx
    c = hx * hx / a
    for p in range(1, nf - 1):
        row = u[p]
        u[p + 1, 1:-1] = (
            2.0 * row[1:-1]
            - u[p - 1, 1:-1]
            + lam * (row[2:] - 2.0 * row[1:-1] + row[:-2])
            - c * src_fine[p, 1:-1]
        )
        u[p + 1, 0] = g[0]
        u[p + 1, -1] = g[-1]

    coarse_pos = refine * (np.arange(n) + 0.5) - 0.5
    out = _resample_axis0(u, coarse_pos)
    if swapped:
        out = out.T
    return ScalarField(problem.grid, out)
