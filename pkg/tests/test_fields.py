import math

import numpy as np
import pytest

from vltomo.errors import FieldFormatError, GeometryError, GridError
from vltomo.fields import (
    Direction,
    Grid,
    ScalarField,
    StarGeometry,
    SymTensorField,
    VLineGeometry,
    make_grid,
    read_field,
    write_field,
)


def test_grid_basic_geometry():
    g = Grid(10)
    assert g.h == pytest.approx(0.2)
    x, y = g.centers()
    assert x[0] == pytest.approx(-0.9)
    assert x[-1] == pytest.approx(0.9)
    assert np.allclose(x, -y[::-1])
    X, Y = g.mesh()
    # axis 0 is x, axis 1 is y
    assert X[3, 0] == pytest.approx(x[3])
    assert Y[0, 7] == pytest.approx(y[7])


def test_grid_rejects_small_or_bad():
    with pytest.raises(GridError):
        make_grid(7)
    with pytest.raises(GridError):
        make_grid(0)
    with pytest.raises(GridError):
        Grid(16, extent=-1.0)
    make_grid(8)  # boundary case is fine


def test_scalar_field_validation():
    g = Grid(8)
    with pytest.raises(GridError):
        ScalarField(g, np.zeros((8, 9)))
    bad = np.zeros((8, 8))
    bad[3, 3] = np.nan
    with pytest.raises(GridError):
        ScalarField(g, bad)
    f = ScalarField(g, np.zeros((8, 8)))
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0  # frozen buffer


def test_field_arithmetic_and_grid_mismatch():
    g = Grid(8)
    a = ScalarField(g, np.full((8, 8), 2.0))
    b = ScalarField(g, np.full((8, 8), 3.0))
    assert np.all((a + b).values == 5.0)
    assert np.all((a - b).values == -1.0)
    assert np.all((2.0 * a).values == 4.0)
    assert np.all((a / 2.0).values == 1.0)
    assert np.all((-a).values == -2.0)
    other = ScalarField(Grid(16), np.zeros((16, 16)))
    with pytest.raises(GridError):
        a + other


def test_tensor_field_shares_grid():
    g = Grid(8)
    z = np.zeros((8, 8))
    t = SymTensorField(g, z, z, z)
    assert t.components == ("f11", "f12", "f22")
    with pytest.raises(GridError):
        SymTensorField(g, z, np.zeros((9, 9)), z)


def test_direction_unit_check():
    Direction(1.0, 0.0)
    Direction.from_angle(1.234)
    with pytest.raises(GeometryError):
        Direction(1.0, 1.0)
    d = Direction.from_angle(0.3)
    p = d.perp()
    assert p.d1 == pytest.approx(-d.d2)
    assert p.d2 == pytest.approx(d.d1)


def test_vline_geometry():
    geom = VLineGeometry.from_angle(math.pi / 3)
    assert geom.u1 == pytest.approx(0.5)
    assert geom.u2 == pytest.approx(math.sqrt(3) / 2)
    assert geom.v.d1 == pytest.approx(-0.5)
    assert geom.v.d2 == pytest.approx(geom.u2)
    assert geom.angle == pytest.approx(math.pi / 3)
    with pytest.raises(GeometryError):
        VLineGeometry(Direction(0.0, -1.0))
    with pytest.raises(GeometryError):
        VLineGeometry.from_angle(-math.pi / 4)


def test_star_geometry_validation():
    star = StarGeometry.three_branch()
    assert star.m == 3
    assert star.weights == (1.0, 1.0, 1.0)
    with pytest.raises(GeometryError):
        StarGeometry.from_angles((0.0,))
    with pytest.raises(GeometryError):
        StarGeometry.from_angles((0.0, 1.0), weights=(1.0, 0.0))
    with pytest.raises(GeometryError):
        StarGeometry.from_angles((0.5, 0.5 + 2 * math.pi))  # same ray twice


def test_csv_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(7)
    g = Grid(16)
    vals = rng.standard_normal((16, 16)) * np.exp(rng.uniform(-30, 30, (16, 16)))
    f = ScalarField(g, vals)
    p = tmp_path / "field.csv"
    write_field(f, p)
    back = read_field(p)
    assert back.grid == g
    assert np.array_equal(back.values, f.values)


def test_csv_header_and_order(tmp_path):
    g = Grid(8)
    vals = np.arange(64, dtype=float).reshape(8, 8)
    p = tmp_path / "f.csv"
    write_field(ScalarField(g, vals), p)
    lines = p.read_text().splitlines()
    assert lines[0] == "n=8 order=y-ascending"
    # first data line is the bottom row (y smallest), x ascending
    assert [float(t) for t in lines[1].split(",")] == list(vals[:, 0])
    assert [float(t) for t in lines[8].split(",")] == list(vals[:, 7])


def test_csv_malformed_inputs(tmp_path):
    p = tmp_path / "bad.csv"

    p.write_text("n=8 order=y-ascending\n1,2,3\n")
    with pytest.raises(FieldFormatError, match="row 2"):
        read_field(p)

    rows = "\n".join(",".join("0" for _ in range(8)) for _ in range(7))
    p.write_text("n=8 order=y-ascending\n" + rows + "\n")
    with pytest.raises(FieldFormatError, match="row"):
        read_field(p)

    rows = []
    for j in range(8):
        row = ["0"] * 8
        if j == 3:
            row[5] = "oops"
        rows.append(",".join(row))
    p.write_text("n=8 order=y-ascending\n" + "\n".join(rows) + "\n")
    with pytest.raises(FieldFormatError, match="row 5, column 6"):
        read_field(p)

    p.write_text("order=y-ascending\n")
    with pytest.raises(FieldFormatError, match="n="):
        read_field(p)

    p.write_text("n=8 order=y-descending\n")
    with pytest.raises(FieldFormatError, match="order"):
        read_field(p)
