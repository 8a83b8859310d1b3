"""Grids, fields, directions, and CSV serialization.

Conventions
-----------
The domain is the square [-extent, extent]^2 split into n x n square cells.
All samples live at cell centers.  ``values[i, j]`` (0-based) sits at::

    x_i = -extent + (i + 0.5) * h,   y_j = -extent + (j + 0.5) * h,
    h   = 2 * extent / n

so axis 0 of every values array is x (column index) and axis 1 is y,
increasing upward ("y-ascending").  Renderers that want scanline order
flip axis 1 on output; nothing in here does.

Grid files are plain CSV: a header line ``n=<n> order=y-ascending``
followed by n rows (y ascending, one grid row per line) of n
comma-separated floats (x ascending).  Floats are written with shortest
round-trip repr, so write -> read is bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FieldFormatError, GeometryError, GridError

MIN_GRID_N = 8
_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform n x n cell-center grid on [-extent, extent]^2."""

    n: int
    extent: float = 1.0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise GridError(f"grid size must be an integer, got {self.n!r}")
        if self.n < MIN_GRID_N:
            raise GridError(f"invalid grid: n={self.n} (need n >= {MIN_GRID_N})")
        if not (float(self.extent) > 0.0) or not math.isfinite(self.extent):
            raise GridError(f"invalid grid: extent={self.extent}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "extent", float(self.extent))

    @property
    def h(self) -> float:
        return 2.0 * self.extent / self.n

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """1-D arrays of cell-center coordinates (x, y)."""
        c = -self.extent + (np.arange(self.n) + 0.5) * self.h
        return c, c.copy()

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinate arrays X, Y of shape (n, n), [ix, iy]."""
        x, y = self.centers()
        return np.meshgrid(x, y, indexing="ij")


def make_grid(n: int, extent: float = 1.0) -> Grid:
    return Grid(n, extent)


def _as_values(grid: Grid, values, what: str) -> np.ndarray:
    a = np.asarray(values, dtype=np.float64)
    if a.shape != (grid.n, grid.n):
        raise GridError(f"{what}: shape {a.shape} does not match grid n={grid.n}")
    if not np.all(np.isfinite(a)):
        raise GridError(f"{what}: values must be finite")
    a = a.copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScalarField:
    """Scalar samples at cell centers; values are read-only once constructed."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.grid, self.values, "ScalarField"))

    # Small arithmetic surface so inversion formulas read like the math.
    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise GridError("field arithmetic across different grids")
            return other.values
        return np.asarray(other, dtype=np.float64)

    def __add__(self, other):
        return ScalarField(self.grid, self.values + self._coerce(other))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return ScalarField(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return ScalarField(self.grid, self.values * self._coerce(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        return ScalarField(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return ScalarField(self.grid, -self.values)


def zeros(grid: Grid) -> ScalarField:
    return ScalarField(grid, np.zeros((grid.n, grid.n)))


@dataclass(frozen=True)
class VectorField:
    """Two-component vector field g = (g1, g2) on a shared grid."""

    grid: Grid
    g1: np.ndarray
    g2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g1", _as_values(self.grid, self.g1, "VectorField.g1"))
        object.__setattr__(self, "g2", _as_values(self.grid, self.g2, "VectorField.g2"))

    def component(self, k: int) -> ScalarField:
        return ScalarField(self.grid, (self.g1, self.g2)[k])


@dataclass(frozen=True)
class SymTensorField:
    """Symmetric 2-tensor field, stored as the three components (f11, f12, f22)."""

    grid: Grid
    f11: np.ndarray
    f12: np.ndarray
    f22: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "f11", _as_values(self.grid, self.f11, "SymTensorField.f11"))
        object.__setattr__(self, "f12", _as_values(self.grid, self.f12, "SymTensorField.f12"))
        object.__setattr__(self, "f22", _as_values(self.grid, self.f22, "SymTensorField.f22"))

    def component(self, name: str) -> ScalarField:
        return ScalarField(self.grid, getattr(self, name))

    def trace(self) -> ScalarField:
        return ScalarField(self.grid, self.f11 + self.f22)

    @property
    def components(self) -> tuple[str, str, str]:
        return ("f11", "f12", "f22")


@dataclass(frozen=True)
class Direction:
    """Unit vector in the plane (checked to 1e-12)."""

    d1: float
    d2: float

    def __post_init__(self):
        n = math.hypot(self.d1, self.d2)
        if abs(n - 1.0) > _UNIT_TOL:
            raise GeometryError(f"direction ({self.d1}, {self.d2}) is not unit (|d|={n})")
        object.__setattr__(self, "d1", float(self.d1))
        object.__setattr__(self, "d2", float(self.d2))

    @classmethod
    def from_angle(cls, theta: float) -> "Direction":
        return cls(math.cos(theta), math.sin(theta))

    def perp(self) -> "Direction":
        """Counterclockwise rotation by 90 degrees: (-d2, d1)."""
        return Direction(-self.d2, self.d1)

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.d1, self.d2])


@dataclass(frozen=True)
class VLineGeometry:
    """V-line branch pair: u = (cos phi, sin phi) with u2 > 0, v = (-u1, u2)."""

    u: Direction

    def __post_init__(self):
        if not self.u.d2 > 0.0:
            raise GeometryError(f"V-line direction needs u2 > 0, got u={self.u}")

    @classmethod
    def from_angle(cls, phi: float) -> "VLineGeometry":
        return cls(Direction.from_angle(phi))

    @property
    def v(self) -> Direction:
        return Direction(-self.u.d1, self.u.d2)

    @property
    def u1(self) -> float:
        return self.u.d1

    @property
    def u2(self) -> float:
        return self.u.d2

    @property
    def angle(self) -> float:
        return math.atan2(self.u.d2, self.u.d1)


_BRANCH_SEP_TOL = 1e-9


@dataclass(frozen=True)
class StarGeometry:
    """Star of m >= 2 distinct ray directions gamma_i with nonzero weights c_i."""

    directions: tuple[Direction, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        dirs = tuple(self.directions)
        wts = tuple(float(c) for c in self.weights)
        if len(dirs) < 2:
            raise GeometryError(f"star needs at least 2 branches, got {len(dirs)}")
        if len(wts) != len(dirs):
            raise GeometryError("star: one weight per branch required")
        if any(c == 0.0 for c in wts):
            raise GeometryError("star: weights must be nonzero")
        angs = [math.atan2(d.d2, d.d1) for d in dirs]
        for a in range(len(angs)):
            for b in range(a + 1, len(angs)):
                sep = abs((angs[a] - angs[b] + math.pi) % (2 * math.pi) - math.pi)
                if sep <= _BRANCH_SEP_TOL:
                    raise GeometryError(f"star: branches {a} and {b} coincide")
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "weights", wts)

    @classmethod
    def from_angles(cls, angles, weights=None) -> "StarGeometry":
        dirs = tuple(Direction.from_angle(a) for a in angles)
        if weights is None:
            weights = (1.0,) * len(dirs)
        return cls(dirs, tuple(weights))

    @classmethod
    def three_branch(cls) -> "StarGeometry":
        """Unit-weight star with branches at 0, 2pi/3 and 4pi/3."""
        return cls.from_angles((0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0))

    @property
    def m(self) -> int:
        return len(self.directions)


# =====================================================================
# CSV grid files
# =====================================================================

def write_field(f: ScalarField, path) -> None:
    """Write a scalar field as a grid CSV (see module docstring for the format)."""
    if not isinstance(f, ScalarField):
        raise GridError(
            f"write_field takes a ScalarField, got {type(f).__name__}; "
            "wrap tensor components with SymTensorField.component()"
        )
    n = f.grid.n
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"n={n} order=y-ascending\n")
        for j in range(n):
            fh.write(",".join(repr(float(v)) for v in f.values[:, j]))
            fh.write("\n")


def read_field(path, extent: float = 1.0) -> ScalarField:
    """Read a grid CSV written by :func:`write_field`.

    The header stores only n; the physical extent is not serialized and
    defaults to 1.  Malformed content raises FieldFormatError naming the
    offending row/column (1-based, header = row 1).
    """
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline()
        if not header:
            raise FieldFormatError(f"{path}: empty file (row 1)")
        tokens = header.strip().replace(",", " ").split()
        n = None
        for tok in tokens:
            if tok.startswith("n="):
                try:
                    n = int(tok[2:])
                except ValueError:
                    raise FieldFormatError(f"{path}: bad grid size {tok!r} (row 1)") from None
            elif tok.startswith("order=") and tok != "order=y-ascending":
                raise FieldFormatError(f"{path}: unsupported row order {tok!r} (row 1)")
        if n is None:
            raise FieldFormatError(f"{path}: header must contain n=<int> (row 1)")
        grid = Grid(n, extent)
        values = np.empty((n, n))
        for j in range(n):
            line = fh.readline()
            if not line:
                raise FieldFormatError(f"{path}: expected {n} data rows, file ends at row {j + 1} (row {j + 2})")
            parts = line.strip().split(",")
            if len(parts) != n:
                raise FieldFormatError(
                    f"{path}: row {j + 2} has {len(parts)} columns, expected {n}"
                )
            for i, tok in enumerate(parts):
                try:
                    values[i, j] = float(tok)
                except ValueError:
                    raise FieldFormatError(
                        f"{path}: bad float {tok!r} at row {j + 2}, column {i + 1}"
                    ) from None
        extra = fh.readline()
        if extra.strip():
            raise FieldFormatError(f"{path}: trailing data after {n} rows (row {n + 2})")
    return ScalarField(grid, values)
