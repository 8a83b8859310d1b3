"""Generalized V-line and star transforms of symmetric 2-tensor fields.

A V-line has vertex x and two upward branches u = (cos phi, sin phi) and
v = (-u1, u2).  The six scalar data families combine divergent beam
transforms of projected tensor components:

    long   L f = X_u <f, u@u>     + X_v <f, v@v>
    trans  T f = X_u <f, up@up>   + X_v <f, vp@vp>
    mixed  M f = X_u <f, u@up>    + X_v <f, v@vp>

(up = 90-degree rotation of u), each with a first-moment variant using
X^1 instead of X.  <.,.> is the symmetric-tensor inner product, realized
by project_tensor as w . f . z.

The star transform uses m weighted branches gamma_i from a common vertex
and identifies tensors with R^3 vectors (f11, f12, f22), with symmetrized
products u@v |-> (u1v1, (u1v2+u2v1)/2, u2v2).  Its three data components
are the weighted branch sums of X_gamma of the *plain dot products* of f
with gamma@gamma, gamma@gammap, gammap@gammap — note the f12 weight is
half the one in project_tensor; the inversion matrix in
inversion.gamma_vectors uses the same identification so the two sides
pair up exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError
from .fields import Direction, ScalarField, StarGeometry, SymTensorField, VLineGeometry
from .raytrace import xray, xray_moment1

VLT_KINDS = ("long", "trans", "mixed")


@dataclass(frozen=True)
class StarData:
    """The three scalar data fields of the star transform."""

    long_c: ScalarField
    mixed_c: ScalarField
    trans_c: ScalarField

    def __post_init__(self):
        if not (self.long_c.grid == self.mixed_c.grid == self.trans_c.grid):
            raise GridError("StarData components must share one grid")

    @property
    def grid(self):
        return self.long_c.grid


def project_tensor(f: SymTensorField, w: Direction, z: Direction) -> ScalarField:
    """Bilinear projection w . f . z = f11 w1 z1 + f12 (w1 z2 + w2 z1) + f22 w2 z2."""
    vals = (
        f.f11 * (w.d1 * z.d1)
        + f.f12 * (w.d1 * z.d2 + w.d2 * z.d1)
        + f.f22 * (w.d2 * z.d2)
    )
    return ScalarField(f.grid, vals)


def _project_identified(f: SymTensorField, w: Direction, z: Direction) -> ScalarField:
    """R^3 dot product of (f11, f12, f22) with the identified vector of w@z."""
    vals = (
        f.f11 * (w.d1 * z.d1)
        + f.f12 * (0.5 * (w.d1 * z.d2 + w.d2 * z.d1))
        + f.f22 * (w.d2 * z.d2)
    )
    return ScalarField(f.grid, vals)


def _beam(h: ScalarField, d: Direction, moment: int) -> ScalarField:
    if moment == 0:
        return xray(h, d)
    if moment == 1:
        return xray_moment1(h, d)
    raise GridError(f"moment must be 0 or 1, got {moment}")


def vline_scalar(h: ScalarField, geom: VLineGeometry, moment: int = 0) -> ScalarField:
    """Scalar V-line transform V h = X_u h + X_v h (or its first moment)."""
    return _beam(h, geom.u, moment) + _beam(h, geom.v, moment)


def vlt_forward(
    f: SymTensorField, geom: VLineGeometry, kind: str, moment: int = 0
) -> ScalarField:
    """One of the six generalized V-line transforms of a tensor field."""
    if kind not in VLT_KINDS:
        raise GridError(f"kind must be one of {VLT_KINDS}, got {kind!r}")
    u, v = geom.u, geom.v
    if kind == "long":
        pairs = ((u, u, u), (v, v, v))
    elif kind == "trans":
        pairs = ((u, u.perp(), u.perp()), (v, v.perp(), v.perp()))
    else:
        pairs = ((u, u, u.perp()), (v, v, v.perp()))
    total = None
    for branch, w, z in pairs:
        term = _beam(project_tensor(f, w, z), branch, moment)
        total = term if total is None else total + term
    return total


def star_forward(f: SymTensorField, star: StarGeometry) -> StarData:
    """Star transform S f: weighted branch sums of the three projected beams."""
    n = f.grid.n
    acc = [np.zeros((n, n)) for _ in range(3)]
    for gamma, c in zip(star.directions, star.weights):
        gp = gamma.perp()
        projs = (
            _project_identified(f, gamma, gamma),
            _project_identified(f, gamma, gp),
            _project_identified(f, gp, gp),
        )
        for k, p in enumerate(projs):
            acc[k] += c * xray(p, gamma).values
    g = f.grid
    return StarData(
        long_c=ScalarField(g, acc[0]),
        mixed_c=ScalarField(g, acc[1]),
        trans_c=ScalarField(g, acc[2]),
    )
