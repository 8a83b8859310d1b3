"""Reconstruction algorithms for V-line and star transform data.

Three families of methods are implemented, all operating on the same data
fields the forward module produces:

* explicit formulas -- potentials and special tensor fields are recovered
  by weighted half-ray integrals of the data (or of derivative
  combinations of it);
* finite-difference solves -- some components satisfy a constant
  coefficient second-order PDE whose source is assembled from the data;
  the equation kind (elliptic / parabolic / hyperbolic) is decided by the
  branch geometry;
* sinogram algebra -- star transform data is converted, angle by angle,
  into the component-wise Radon transform of the tensor by inverting a
  3x3 direction matrix, then backprojected.

Every derivative-of-data intermediate passes through ``zero_margin``:
one-sided differencing at the boundary of the data square produces a
spurious frame of large values, and the margined quantities are (with
one documented exception in the moment-based methods) compactly
supported inside the grid, so zeroing a thin frame removes the junk
without touching signal.

Operator ordering: integrals and constant-direction derivatives commute,
so formulas of the shape "integral of D_u D_v of an integral of data"
admit several discrete realizations.  Terms written with the derivative
innermost are evaluated differentiate-first (margin the compact
second-derivative field, then integrate); terms written with an integral
innermost are evaluated in that printed order (integrate, differentiate,
margin the composite).  See ``_moment_f12`` for the one place where the
distinction is material.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calculus import axis_integral, dir_deriv, gradient
from .errors import GeometryError, GridError, SingularDirectionError, SolveError
from .fields import (
    Direction,
    ScalarField,
    StarGeometry,
    SymTensorField,
    VectorField,
    VLineGeometry,
)
from .pdesolve import SecondOrderProblem, solve_elliptic, solve_hyperbolic, solve_parabolic
from .radon import Sinogram, fbp, radon_forward, sino_sderiv
from .vlt import StarData, vline_scalar

_EQUAL_COMPONENTS_TOL = 1e-12  # |u1 - u2| below this is the u1 = u2 branch
_EPS_SING = 1e-3               # |xi . gamma_i| below this is a singular direction
_DET_TOL = 1e-10               # |det Q| below this marks a type-2 singular direction
_QSOLVE_RESIDUAL = 1e-8


def zero_margin(h: ScalarField, px: int = 5) -> ScalarField:
    """Copy of ``h`` with the outer ``px``-wide frame of cells set to zero."""
    n = h.grid.n
    if px < 0 or 2 * px >= n:
        raise GridError(f"margin width {px} must satisfy 0 <= px < n/2 (n={n})")
    if px == 0:
        return ScalarField(h.grid, h.values)
    vals = h.values.copy()
    vals[:px, :] = 0.0
    vals[-px:, :] = 0.0
    vals[:, :px] = 0.0
    vals[:, -px:] = 0.0
    return ScalarField(h.grid, vals)


def _du_dv(data: ScalarField, geom: VLineGeometry) -> ScalarField:
    """Second directional derivative D_u D_v of a data field."""
    return dir_deriv(dir_deriv(data, geom.u), geom.v)


def _margined_du_dv(data: ScalarField, geom: VLineGeometry, margin: int) -> ScalarField:
    return zero_margin(_du_dv(data, geom), margin)


def _dx(phi: ScalarField) -> ScalarField:
    return gradient(phi).component(0)


def _dy(phi: ScalarField) -> ScalarField:
    return gradient(phi).component(1)


def _require_opening(geom: VLineGeometry) -> None:
    if abs(geom.u1) <= 1e-9:
        raise GeometryError(
            "branch direction has no horizontal component; the two branches "
            "coincide and this reconstruction divides by u1"
        )


# =====================================================================
# Potential recovery: f = d^2 phi, f = (dperp)^2 phi, f = d dperp phi
# =====================================================================

def invert_d2phi(data: ScalarField, geom: VLineGeometry, src: str = "L") -> ScalarField:
    """Recover phi from longitudinal or mixed data of f = d2(phi).

    phi = X_{+e2}(long data) / (2 u2) = -X_{+e1}(mixed data) / (2 u2).
    """
    if src == "L":
        return axis_integral(data, "+e2") * (1.0 / (2.0 * geom.u2))
    if src == "M":
        return axis_integral(data, "+e1") * (-1.0 / (2.0 * geom.u2))
    raise GridError(f"src must be 'L' or 'M', got {src!r}")


def invert_dperp2phi(data: ScalarField, geom: VLineGeometry, src: str = "T") -> ScalarField:
    """Recover phi from transverse or mixed data of f = dperp2(phi).

    phi = X_{+e2}(trans data) / (2 u2) = +X_{+e1}(mixed data) / (2 u2).
    """
    if src == "T":
        return axis_integral(data, "+e2") * (1.0 / (2.0 * geom.u2))
    if src == "M":
        return axis_integral(data, "+e1") * (1.0 / (2.0 * geom.u2))
    raise GridError(f"src must be 'T' or 'M', got {src!r}")


def invert_ddperpphi(
    dataL: ScalarField | None = None,
    dataT: ScalarField | None = None,
    dataM: ScalarField | None = None,
    geom: VLineGeometry | None = None,
    *,
    margin: int = 5,
    refine: int = 4,
) -> ScalarField:
    """Recover phi from data of f = ddperp(phi).

    The longitudinal and transverse data invert explicitly:
    phi = X_{+e1}(long) / (2 u2) = -X_{+e1}(trans) / (2 u2).
    The mixed data requires a second-order solve of

        (1 + 2 u1^2) phi_xx + (u1^2 - u2^2) phi_yy = -X_{+e2}(D_u D_v M) / u2

    which is elliptic for u1 > u2, parabolic for u1 = u2, and hyperbolic
    for u1 < u2.  If several data fields are given the first available of
    L, T, M is used.
    """
    if geom is None:
        raise GeometryError("invert_ddperpphi requires the branch geometry")
    if dataL is not None:
        return axis_integral(dataL, "+e1") * (1.0 / (2.0 * geom.u2))
    if dataT is not None:
        return axis_integral(dataT, "+e1") * (-1.0 / (2.0 * geom.u2))
    if dataM is None:
        raise GridError("invert_ddperpphi needs at least one of dataL, dataT, dataM")
    src = axis_integral(_margined_du_dv(dataM, geom, margin), "+e2") * (1.0 / geom.u2)
    problem = SecondOrderProblem(
        dataM.grid,
        a=1.0 + 2.0 * geom.u1**2,
        b=geom.u1**2 - geom.u2**2,
        source=src,
    )
    return _dispatch_second_order(problem, refine)


def _dispatch_second_order(problem: SecondOrderProblem, refine: int) -> ScalarField:
    kind = problem.kind
    if kind == "elliptic":
        return solve_elliptic(problem)
    if kind == "parabolic":
        return solve_parabolic(problem)
    return solve_hyperbolic(problem, refine=refine)


# =====================================================================
# Potential recovery: f = d(g), f = dperp(g) for a vector field g
# =====================================================================

def invert_dg(
    dataL: ScalarField,
    dataM: ScalarField,
    geom: VLineGeometry,
    *,
    margin: int = 5,
    refine: int = 4,
) -> VectorField:
    """Recover g = (g1, g2) from longitudinal and mixed data of f = d(g).

    g2 = -(long data) / (2 u2) pointwise; g1 solves

        2 u1^2 g1_xx + (u1^2 - u2^2) g1_yy = -D_u D_v h / (2 u2),
        h = 2 (mixed data) + V(d g2 / dx).
    """
    g2 = dataL * (-1.0 / (2.0 * geom.u2))
    h = dataM * 2.0 + vline_scalar(_dx(g2), geom)
    src = zero_margin(_du_dv(h, geom), margin) * (1.0 / (2.0 * geom.u2))
    problem = SecondOrderProblem(
        dataL.grid, a=2.0 * geom.u1**2, b=geom.u1**2 - geom.u2**2, source=src
    )
    g1 = _dispatch_second_order(problem, refine)
    return VectorField(dataL.grid, g1.values, g2.values)


def invert_dperpg(
    dataT: ScalarField,
    dataM: ScalarField,
    geom: VLineGeometry,
    *,
    margin: int = 5,
    refine: int = 4,
) -> VectorField:
    """Recover g = (g1, g2) from transverse and mixed data of f = dperp(g).

    g1 = (trans data) / (2 u2) pointwise; g2 solves the same equation as
    in invert_dg with h replaced by -2 (mixed data) - V(d g1 / dx).
    """
    g1 = dataT * (1.0 / (2.0 * geom.u2))
    h = dataM * (-2.0) - vline_scalar(_dx(g1), geom)
    src = zero_margin(_du_dv(h, geom), margin) * (1.0 / (2.0 * geom.u2))
    problem = SecondOrderProblem(
        dataT.grid, a=2.0 * geom.u1**2, b=geom.u1**2 - geom.u2**2, source=src
    )
    g2 = _dispatch_second_order(problem, refine)
    return VectorField(dataT.grid, g1.values, g2.values)


# =====================================================================
# Full tensor recovery from {L, T, M}
# =====================================================================

def invert_LTM(
    dataL: ScalarField,
    dataT: ScalarField,
    dataM: ScalarField,
    geom: VLineGeometry,
    *,
    margin: int = 5,
) -> SymTensorField:
    """Recover all three tensor components from the three plain transforms.

    For u1 = u2 the components come from explicit half-ray integrals of
    D_u D_v of data combinations.  For u1 != u2, f12 first solves a
    zero-Dirichlet elliptic problem (both coefficients are positive for
    any unit branch direction), then f11 follows by an e2 half-ray
    integral and f22 by the trace relation.
    """
    _require_opening(geom)
    u1, u2 = geom.u1, geom.u2
    grid = dataL.grid
    if abs(u1 - u2) <= _EQUAL_COMPONENTS_TOL:
        d_sum = zero_margin(_du_dv(dataL + dataT, geom), margin)
        d_dif = zero_margin(_du_dv(dataL - dataT, geom), margin)
        d_mix = zero_margin(_du_dv(dataM, geom), margin)
        trace_half = axis_integral(d_sum, "+e2") * (1.0 / (4.0 * u2))
        skew_half = axis_integral(d_mix, "-e1") * (1.0 / (2.0 * u1))
        f11 = trace_half - skew_half
        f22 = trace_half + skew_half
        f12 = axis_integral(d_dif, "-e1") * (1.0 / (4.0 * u1))
        return SymTensorField(grid, f11.values, f12.values, f22.values)

    d_long = zero_margin(_du_dv(dataL, geom), margin)
    d_trans = zero_margin(_du_dv(dataT, geom), margin)
    d_mix = zero_margin(_du_dv(dataM, geom), margin)
    delta = u1**2 - u2**2
    g = (_dx(d_trans - d_long) * u1**2 + _dy(d_mix) * delta) * (1.0 / (2.0 * u2))
    problem = SecondOrderProblem(
        grid,
        a=2.0 * u1**2 * (1.0 + delta),
        b=delta**2,
        source=g,
    )
    f12 = solve_elliptic(problem)
    bracket = (d_trans * u2**2 - d_long * u1**2 + _dx(f12) * (4.0 * u1**2 * u2)) * (
        1.0 / (2.0 * u2 * delta)
    )
    f11 = axis_integral(bracket, "+e2") * (-1.0)
    f22 = axis_integral(d_long + d_trans, "+e2") * (1.0 / (2.0 * u2)) - f11
    return SymTensorField(grid, f11.values, f12.values, f22.values)


# =====================================================================
# Moment-based recoveries: {L, L1, T} and {L, L1, M}
# =====================================================================

def _moment_core(
    dataL: ScalarField, dataL1: ScalarField, geom: VLineGeometry, margin: int
) -> ScalarField:
    """D_u D_v (first-moment long data) + (D_u + D_v)(long data), margined.

    Individually both terms have slowly decaying tails below the support;
    their sum is compactly supported, so the margin is applied to the
    combination rather than to each term.
    """
    combo = _du_dv(dataL1, geom) + dir_deriv(dataL, geom.u) + dir_deriv(dataL, geom.v)
    return zero_margin(combo, margin)


def _moment_f12(
    dataL: ScalarField,
    dataL1: ScalarField,
    geom: VLineGeometry,
    margin: int,
) -> ScalarField:
    """f12 = d/dy X_{+e1}[core + D_u D_v X_{+e2}(long data) / u2] / (4 u1^2).

    The trailing term is evaluated in the printed operator order (upward
    integral innermost, directional derivatives outside, frame zeroed
    last).  Unlike every other margined quantity in this module, that
    composite is NOT compactly supported -- it carries a tail running to
    the bottom of the grid -- so zeroing its frame cuts the tail
    mid-domain and the outer y-derivative amplifies the jump by one
    inverse grid spacing.  This is the documented behavior of the
    moment-based methods: their f12 errors sit an order of magnitude
    above the diagonal ones and grow steeply with noise.
    """
    core = _moment_core(dataL, dataL1, geom, margin)
    tail = zero_margin(_du_dv(axis_integral(dataL, "+e2"), geom), margin)
    inner = axis_integral(core + tail * (1.0 / geom.u2), "+e1")
    return _dy(inner) * (1.0 / (4.0 * geom.u1**2))


def invert_LL1T(
    dataL: ScalarField,
    dataL1: ScalarField,
    dataT: ScalarField,
    geom: VLineGeometry,
    *,
    margin: int = 5,
) -> SymTensorField:
    """Recover the tensor from long, first-moment long, and trans data.

    Valid only for u1 != u2 (the diagonal-component formulas divide by
    u2^2 - u1^2).  The f12 reconstruction is ill-conditioned (see
    ``_moment_f12``); its error is expected to dwarf the diagonal ones.
    """
    _require_opening(geom)
    u1, u2 = geom.u1, geom.u2
    if abs(u1**2 - u2**2) < 1e-9:
        raise GeometryError(
            "equal branch components: the diagonal formulas divide by u2^2 - u1^2"
        )
    core = _moment_core(dataL, dataL1, geom, margin)
    f12 = _moment_f12(dataL, dataL1, geom, margin)
    trace_int = axis_integral(zero_margin(_du_dv(dataL + dataT, geom), margin), "+e2")
    f11 = (core + trace_int * u2) * (1.0 / (2.0 * (u2**2 - u1**2)))
    f22 = (core + trace_int * (u1**2 / u2)) * (1.0 / (2.0 * (u1**2 - u2**2)))
    return SymTensorField(dataL.grid, f11.values, f12.values, f22.values)


def invert_LL1M(
    dataL: ScalarField,
    dataL1: ScalarField,
    dataM: ScalarField,
    geom: VLineGeometry,
    *,
    margin: int = 5,
) -> SymTensorField:
    """Recover the tensor from long, first-moment long, and mixed data.

    f12 uses the same moment formula as invert_LL1T; the diagonal
    components then subtract the f12 coupling from the mixed data.  The
    coupling carries a factor u1^2 - u2^2, so at u1 = u2 the (noisy) f12
    reconstruction never enters the diagonal formulas.
    """
    _require_opening(geom)
    u1, u2 = geom.u1, geom.u2
    core = _moment_core(dataL, dataL1, geom, margin)
    f12 = _moment_f12(dataL, dataL1, geom, margin)
    coupled = vline_scalar(f12, geom) * (u1**2 - u2**2) - dataM
    coupled_int = axis_integral(zero_margin(_du_dv(coupled, geom), margin), "-e1")
    f11 = (core - coupled_int * (u2 / u1**2)) * (-0.5)
    f22 = (core + coupled_int * (1.0 / u2)) * (-0.5)
    return SymTensorField(dataL.grid, f11.values, f12.values, f22.values)


# =====================================================================
# Star transform inversion through the Radon domain
# =====================================================================

def _identified(w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Symmetrized product of two 2-vectors as the 3-vector (11, 12, 22)."""
    return np.array(
        [w[0] * z[0], 0.5 * (w[0] * z[1] + w[1] * z[0]), w[1] * z[1]]
    )


@dataclass(frozen=True)
class QMatrix:
    """Direction matrix pairing star data with component Radon data.

    Rows are the weighted branch sums of the identified products
    (gamma, gamma), (gamma, gamma-perp), (gamma-perp, gamma-perp), each
    divided by -(xi . gamma): multiplying the component-wise Radon
    transform (R f11, R f12, R f22) at (xi, s) by this matrix gives the
    offset derivative of the Radon transform of the star data.
    """

    xi: Direction
    matrix: np.ndarray

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        out = np.linalg.solve(self.matrix, rhs)
        residual = np.abs(self.matrix @ out - rhs).max()
        scale = max(np.abs(rhs).max(), 1.0)
        if residual > _QSOLVE_RESIDUAL * scale:
            raise SolveError(
                f"direction-matrix solve residual {residual:.3e} exceeds "
                f"{_QSOLVE_RESIDUAL:.0e} x {scale:.3e}"
            )
        return out


def gamma_vectors(
    sg: StarGeometry, xi: Direction, *, eps_sing: float = _EPS_SING
) -> QMatrix:
    """Assemble the 3x3 direction matrix for the star geometry at xi.

    Raises a type-1 singular-direction error when xi is (nearly)
    orthogonal to any branch, and a type-2 error when the assembled
    matrix is (nearly) singular.
    """
    rows = np.zeros((3, 3))
    for gamma, c in zip(sg.directions, sg.weights):
        dot = xi.d1 * gamma.d1 + xi.d2 * gamma.d2
        if abs(dot) < eps_sing:
            raise SingularDirectionError(
                f"direction ({xi.d1:+.6f}, {xi.d2:+.6f}) is orthogonal to a "
                f"branch (|xi . gamma| = {abs(dot):.2e} < {eps_sing})",
                kind=1,
            )
        g = np.array([gamma.d1, gamma.d2])
        gp = np.array([-gamma.d2, gamma.d1])
        rows[0] -= (c / dot) * _identified(g, g)
        rows[1] -= (c / dot) * _identified(g, gp)
        rows[2] -= (c / dot) * _identified(gp, gp)
    det = np.linalg.det(rows)
    if abs(det) < _DET_TOL:
        raise SingularDirectionError(
            f"direction matrix is singular at ({xi.d1:+.6f}, {xi.d2:+.6f}) "
            f"(|det| = {abs(det):.2e})",
            kind=2,
        )
    return QMatrix(xi=xi, matrix=rows)


def _drop_mask(angles: np.ndarray, sg: StarGeometry, band_deg: float) -> np.ndarray:
    """True for sinogram angles within band_deg of a singular direction."""
    band = math.radians(band_deg)
    singular = [math.atan2(g.d1, -g.d2) % math.pi for g in sg.directions]
    drop = np.zeros(angles.shape, dtype=bool)
    for s in singular:
        delta = np.abs((angles - s + math.pi / 2.0) % math.pi - math.pi / 2.0)
        drop |= delta < band
    return drop


def _fill_dropped(values: np.ndarray, kept: np.ndarray) -> np.ndarray:
    """Linear interpolation in angle (per offset) across dropped rows."""
    idx = np.arange(values.shape[0], dtype=float)
    filled = values.copy()
    missing = ~kept
    if not missing.any():
        return filled
    for c in range(values.shape[1]):
        filled[missing, c] = np.interp(idx[missing], idx[kept], values[kept, c])
    return filled


def invert_star(
    data: StarData,
    sg: StarGeometry,
    *,
    n_angles: int = 180,
    drop_band_deg: float = 2.0,
    mask_radius: float | None = None,
) -> SymTensorField:
    """Recover the tensor from star transform data.

    Per sinogram angle xi, the offset derivatives of the Radon transforms
    of the three star data components equal the direction matrix applied
    to the component-wise Radon transform of the tensor; solving the 3x3
    system per offset recovers the three component sinograms, which are
    backprojected individually.  Angles within ``drop_band_deg`` of a
    direction orthogonal to any branch are discarded and refilled by
    linear interpolation in angle.  ``mask_radius`` (in units of the grid
    extent) optionally zeroes the reconstruction outside a centered disc,
    removing out-of-view artifacts.
    """
    grid = data.grid
    components = (data.long_c, data.mixed_c, data.trans_c)
    sinos = [radon_forward(c, n_angles) for c in components]
    derivs = np.stack([sino_sderiv(s).values for s in sinos])  # (3, k, m)
    angles = sinos[0].angles
    offsets = sinos[0].offsets

    drop = _drop_mask(angles, sg, drop_band_deg)
    recon = np.zeros_like(derivs)
    kept = np.zeros(angles.shape, dtype=bool)
    for k, theta in enumerate(angles):
        if drop[k]:
            continue
        xi = Direction(math.cos(theta), math.sin(theta))
        try:
            q = gamma_vectors(sg, xi)
        except SingularDirectionError as exc:
            if exc.kind == 1:
                continue  # treat near-orthogonal angles like dropped ones
            raise
        recon[:, k, :] = q.solve(derivs[:, k, :])
        kept[k] = True
    if not kept.any():
        raise SingularDirectionError(
            "every sinogram angle is orthogonal to some branch; the star "
            "geometry leaves no usable directions",
            kind=1,
        )

    fields = []
    for ci in range(3):
        filled = _fill_dropped(recon[ci], kept)
        rec = fbp(Sinogram(angles, offsets, filled), grid)
        fields.append(rec.values)
    if mask_radius is not None:
        xx, yy = grid.mesh()
        outside = xx**2 + yy**2 > (mask_radius * grid.extent) ** 2
        fields = [np.where(outside, 0.0, v) for v in fields]
    return SymTensorField(grid, fields[0], fields[1], fields[2])
