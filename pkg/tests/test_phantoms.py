import math

import numpy as np
import pytest

from vltomo.errors import GridError
from vltomo.fields import Grid
from vltomo.phantoms import (
    CUTOFF_PEAK,
    cutoff_eval,
    phantom1,
    phantom2,
    potential_scalar,
    potential_vector,
)


def test_cutoff_pointwise_values():
    # peak at the center, hard zero outside, tiny near the rim
    assert cutoff_eval(0.0, 0.0, (0.0, 0.0), 0.5) == pytest.approx(math.exp(-1.0))
    assert CUTOFF_PEAK == pytest.approx(math.exp(-1.0))
    assert cutoff_eval(0.6, 0.0, (0.0, 0.0), 0.5) == 0.0
    assert cutoff_eval(0.5, 0.0, (0.0, 0.0), 0.5) == 0.0  # rim itself
    assert cutoff_eval(0.499, 0.0, (0.0, 0.0), 0.5) < 1e-100
    # exact formula at an interior point: rho2=0.09, r2=0.25
    expect = math.exp(-0.25 / (0.25 - 0.09))
    assert cutoff_eval(0.3, 0.0, (0.0, 0.0), 0.5) == pytest.approx(expect, rel=1e-15)
    with pytest.raises(GridError):
        cutoff_eval(0.0, 0.0, (0.0, 0.0), 0.0)


def test_cutoff_vectorized_matches_scalar():
    rng = np.random.default_rng(3)
    xs = rng.uniform(-1, 1, 40)
    ys = rng.uniform(-1, 1, 40)
    arr = cutoff_eval(xs, ys, (0.1, -0.2), 0.45)
    for k in range(40):
        assert arr[k] == cutoff_eval(xs[k], ys[k], (0.1, -0.2), 0.45)


def test_phantom1_support_and_scale():
    g = Grid(200)
    ph = phantom1(g)
    X, Y = g.mesh()
    outside = X * X + Y * Y > 0.8 * 0.8
    for name in ph.components:
        vals = getattr(ph, name)
        assert np.all(vals[outside] == 0.0)
        assert vals.max() > 0.2  # bumps peak near exp(-1)
        assert vals.min() >= 0.0
        assert vals.max() <= 3.0 * CUTOFF_PEAK + 1e-12


def test_phantom1_matches_direct_sum_at_samples():
    g = Grid(64)
    ph = phantom1(g)
    x, y = g.centers()
    # f12 layout: bumps at (0,0) r=sqrt(0.1) and (+-0.3, 0.2) r=sqrt(0.03)
    i, j = 40, 20
    direct = (
        cutoff_eval(x[i], y[j], (0.0, 0.0), math.sqrt(0.1))
        + cutoff_eval(x[i], y[j], (0.3, 0.2), math.sqrt(0.03))
        + cutoff_eval(x[i], y[j], (-0.3, 0.2), math.sqrt(0.03))
    )
    assert ph.f12[i, j] == pytest.approx(direct, rel=1e-15)


def test_phantom2_binary_and_bounded():
    g = Grid(160)
    ph = phantom2(g)
    X, Y = g.mesh()
    for name in ph.components:
        vals = getattr(ph, name)
        assert set(np.unique(vals)) <= {0.0, 1.0}
        assert vals.sum() > 0
        assert np.all(vals[(np.abs(X) > 0.46) | (np.abs(Y) > 0.46)] == 0.0)
        assert np.all(vals[X * X + Y * Y > 0.8 * 0.8] == 0.0)


def test_phantom2_letter_shapes():
    g = Grid(160)
    ph = phantom2(g)
    X, Y = g.mesh()
    # V (f11) is mirror-symmetric in x and opens upward
    assert np.array_equal(ph.f11, ph.f11[::-1, :])
    top = ph.f11[:, Y[0] > 0.3].sum()
    bottom = ph.f11[:, Y[0] < -0.3].sum()
    assert top > bottom > 0
    # L (f12) hugs the lower-left: nothing in the upper-right quadrant
    assert ph.f12[(X > 0.0) & (Y > 0.0)].sum() == 0.0
    assert ph.f12[(X < -0.2) & (Y > 0.2)].sum() > 0
    # T (f22) has a full-width top bar and a thin stem
    bar_row = np.argmin(np.abs(Y[0] - 0.4))
    stem_row = np.argmin(np.abs(Y[0] + 0.2))
    assert ph.f22[:, bar_row].sum() > 3 * ph.f22[:, stem_row].sum()


def test_phantom2_pixel_counts_frozen():
    # Golden rasterization counts at n=160; any change to the letter
    # geometry or the center-inclusion rule must be deliberate.
    ph = phantom2(Grid(160))
    assert int(ph.f11.sum()) == 1288
    assert int(ph.f12.sum()) == 1020
    assert int(ph.f22.sum()) == 980


def test_potentials_reuse_phantom_layouts():
    g = Grid(100)
    ph1 = phantom1(g)
    ph2 = phantom2(g)
    assert np.array_equal(potential_scalar(g, smooth=True).values, ph1.f12)
    assert np.array_equal(potential_scalar(g, smooth=False).values, ph2.f11)
    vec_s = potential_vector(g, smooth=True)
    assert np.array_equal(vec_s.g1, ph1.f11)
    assert np.array_equal(vec_s.g2, ph1.f22)
    vec_n = potential_vector(g, smooth=False)
    assert np.array_equal(vec_n.g1, ph2.f11)
    assert np.array_equal(vec_n.g2, ph2.f22)
