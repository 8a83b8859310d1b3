"""Parallel-beam Radon transform, offset derivative, and filtered backprojection.

The Radon value at (theta, s) is the line integral of the pixelized field
over {x . xi = s}, xi = (cos theta, sin theta), computed with exact chord
lengths: every line is clipped against the square and split at all grid
crossings, so the only discretization is the pixelization itself.  Angles
are uniform over [0, pi); offsets are uniform with spacing h and span
[-sqrt(2), sqrt(2)] * extent so every line meeting the square is covered.

Sinogram CSV format: header line ``angles=<k> offsets=<m> ds=<h>``, then
one row per angle of m comma-separated values (offsets ascending,
symmetric about 0); angles are the implied uniform grid j*pi/k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FieldFormatError, GridError
from .fields import Grid, ScalarField


@dataclass(frozen=True)
class Sinogram:
    angles: np.ndarray   # (k,) radians, uniform in [0, pi)
    offsets: np.ndarray  # (m,) uniform, symmetric about 0
    values: np.ndarray   # (k, m)

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        offsets = np.asarray(self.offsets, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (angles.size, offsets.size):
            raise GridError(
                f"sinogram shape {values.shape} does not match "
                f"{angles.size} angles x {offsets.size} offsets"
            )
        if offsets.size < 2:
            raise GridError("sinogram needs at least two offsets")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "values", values)

    @property
    def ds(self) -> float:
        return float(self.offsets[1] - self.offsets[0])


def _line_integrals(values: np.ndarray, grid: Grid, theta: float, offsets: np.ndarray) -> np.ndarray:
    """Exact chordal integrals over the parallel family {x . xi = s}."""
    e, h, n = grid.extent, grid.h, grid.n
    xi1, xi2 = math.cos(theta), math.sin(theta)
    eta1, eta2 = -xi2, xi1
    p0x = offsets * xi1
    p0y = offsets * xi2

    t_lo = np.full(offsets.shape, -np.inf)
    t_hi = np.full(offsets.shape, np.inf)
    alive = np.ones(offsets.shape, dtype=bool)
    for p0, eta in ((p0x, eta1), (p0y, eta2)):
        if abs(eta) > 1e-14:
            ta = (-e - p0) / eta
            tb = (e - p0) / eta
            t_lo = np.maximum(t_lo, np.minimum(ta, tb))
            t_hi = np.minimum(t_hi, np.maximum(ta, tb))
        else:
            alive &= np.abs(p0) <= e
    alive &= t_hi > t_lo
    t_lo = np.where(alive, t_lo, 0.0)
    t_hi = np.where(alive, t_hi, 0.0)

    lines = -e + h * np.arange(n + 1)
    cuts = [t_lo[:, None], t_hi[:, None]]
    if abs(eta1) > 1e-14:
        cuts.append((lines[None, :] - p0x[:, None]) / eta1)
    if abs(eta2) > 1e-14:
        cuts.append((lines[None, :] - p0y[:, None]) / eta2)
    ts = np.concatenate(cuts, axis=1)
    ts = np.clip(ts, t_lo[:, None], t_hi[:, None])
    ts.sort(axis=1)

    mids = 0.5 * (ts[:, 1:] + ts[:, :-1])
    lens = np.diff(ts, axis=1)
    px = p0x[:, None] + mids * eta1
    py = p0y[:, None] + mids * eta2
    ix = np.floor((px + e) / h).astype(np.intp)
    iy = np.floor((py + e) / h).astype(np.intp)
    valid = (lens > 0.0) & (ix >= 0) & (ix < n) & (iy >= 0) & (iy < n)
    ix = np.clip(ix, 0, n - 1)
    iy = np.clip(iy, 0, n - 1)
    contrib = np.where(valid, values[ix, iy] * lens, 0.0)
    return contrib.sum(axis=1)


def radon_forward(f: ScalarField, n_angles: int = 180) -> Sinogram:
    """Sinogram of a scalar field over n_angles uniform angles in [0, pi)."""
    if n_angles < 2:
        raise GridError(f"need at least 2 angles, got {n_angles}")
    grid = f.grid
    q = math.ceil(math.sqrt(2.0) * grid.extent / grid.h)
    offsets = np.arange(-q, q + 1) * grid.h
    angles = np.arange(n_angles) * (math.pi / n_angles)
    values = np.empty((n_angles, offsets.size))
    for k, theta in enumerate(angles):
        values[k] = _line_integrals(f.values, grid, theta, offsets)
    return Sinogram(angles, offsets, values)


def sino_sderiv(sg: Sinogram) -> Sinogram:
    """d/ds of the sinogram: central differences inside, one-sided at the ends."""
    deriv = np.gradient(sg.values, sg.ds, axis=1, edge_order=1)
    return Sinogram(sg.angles, sg.offsets, deriv)


def fbp(sg: Sinogram, grid: Grid) -> ScalarField:
    """Filtered backprojection (ramp filter, linear-interpolation smear)."""
    need = math.sqrt(2.0) * grid.extent
    if sg.offsets[0] > -need + 1e-9 or sg.offsets[-1] < need - 1e-9:
        raise GridError("sinogram offsets do not cover the grid diagonal")
    k, m = sg.values.shape
    ds = sg.ds
    pad = 1 << max(4, int(math.ceil(math.log2(2 * m))))
    freqs = np.fft.rfftfreq(pad, d=ds)
    proj = np.zeros((k, pad))
    proj[:, :m] = sg.values
    filtered = np.fft.irfft(np.fft.rfft(proj, axis=1) * freqs[None, :], n=pad, axis=1)[:, :m]

    X, Y = grid.mesh()
    acc = np.zeros(X.shape)
    for j, theta in enumerate(np.asarray(sg.angles)):
        s = X * math.cos(theta) + Y * math.sin(theta)
        acc += np.interp(s.ravel(), sg.offsets, filtered[j], left=0.0, right=0.0).reshape(X.shape)
    return ScalarField(grid, acc * (math.pi / k))


def write_sinogram(sg: Sinogram, path) -> None:
    k, m = sg.values.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"angles={k} offsets={m} ds={sg.ds!r}\n")
        for row in sg.values:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_sinogram(path) -> Sinogram:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split()
        try:
            fields = dict(tok.split("=", 1) for tok in header)
            k = int(fields["angles"])
            m = int(fields["offsets"])
            ds = float(fields["ds"])
        except (KeyError, ValueError):
            raise FieldFormatError(f"{path}: bad sinogram header (row 1)") from None
        values = np.empty((k, m))
        for j in range(k):
            line = fh.readline()
            if not line:
                raise FieldFormatError(f"{path}: expected {k} rows, ends at row {j + 1} (row {j + 2})")
            parts = line.strip().split(",")
            if len(parts) != m:
                raise FieldFormatError(f"{path}: row {j + 2} has {len(parts)} columns, expected {m}")
            try:
                values[j] = [float(tok) for tok in parts]
            except ValueError:
                raise FieldFormatError(f"{path}: bad float in row {j + 2}") from None
    angles = np.arange(k) * (math.pi / k)
    offsets = (np.arange(m) - (m - 1) / 2.0) * ds
    return Sinogram(angles, offsets, values)
