"""Watch the moment-based f12 formula fall apart under noise.

Recovering a full tensor from longitudinal data plus its first moment
(and one more plain transform) works cleanly for the diagonal
components, but the off-diagonal formula differentiates a quantity whose
support runs into the cut at the data frame, so its error starts an
order of magnitude above the others and grows steeply with noise.  The
diagonal errors grow with noise as well -- every formula passes the
noisy moment data through second derivatives -- yet they stay two orders
of magnitude below f12 at every level.  This script reproduces that on a
smooth tensor with the {long, first-moment long, mixed} data set at the
pi/4 branch angle, where the diagonal formulas at least never inherit
the reconstructed f12 (its coupling carries a factor u1^2 - u2^2 = 0).

Run:  python3 demos/moment_illconditioning.py
"""

import math

import numpy as np

from vltomo.fields import Direction, Grid, ScalarField, VLineGeometry
from vltomo.harness import relative_error_spectral
from vltomo.inversion import invert_LL1M
from vltomo.phantoms import phantom1
from vltomo.vlt import vlt_forward


def main():
    grid = Grid(256)
    geom = VLineGeometry(Direction(math.cos(math.pi / 4), math.sin(math.pi / 4)))
    f = phantom1(grid)

    data = {
        "long": vlt_forward(f, geom, "long"),
        "long1": vlt_forward(f, geom, "long", moment=1),
        "mixed": vlt_forward(f, geom, "mixed"),
    }

    print("tensor from {L, L1, M} data at pi/4, n=256")
    print(f"{'noise':>6} {'f11 err %':>10} {'f12 err %':>10} {'f22 err %':>10} "
          f"{'f12 / worst diag':>17}")
    for idx, percent in enumerate((0.0, 5.0, 10.0, 20.0)):
        rng = np.random.default_rng((1, idx))
        noisy = {}
        for name in sorted(data):
            base = data[name]
            if percent == 0.0:
                noisy[name] = base
            else:
                sigma = (percent / 100.0) * float(np.sqrt(np.mean(base.values**2)))
                noisy[name] = ScalarField(
                    base.grid,
                    base.values + rng.normal(0.0, sigma, base.values.shape),
                )
        rec = invert_LL1M(noisy["long"], noisy["long1"], noisy["mixed"], geom)
        errs = [
            relative_error_spectral(f.component(c), rec.component(c))
            for c in ("f11", "f12", "f22")
        ]
        ratio = errs[1] / max(errs[0], errs[2])
        print(f"{percent:6.0f} {errs[0]:10.2f} {errs[1]:10.2f} {errs[2]:10.2f} "
              f"{ratio:16.0f}x")
    print("f12 is off the chart before any noise and stays ~100x above the rest")


if __name__ == "__main__":
    main()
