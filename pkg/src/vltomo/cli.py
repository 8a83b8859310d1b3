"""Command-line interface.

Subcommands:

* ``vlt phantom``      -- write a test field's component grids as CSV.
* ``vlt forward``      -- compute one transform of a tensor phantom.
* ``vlt invert``       -- single forward-noise-invert run with errors.
* ``vlt experiment``   -- full multi-noise-level experiment with manifest.
* ``vlt pde-selftest`` -- manufactured-solution convergence check of the
  three finite-difference solvers.

Exit codes: 0 success, 2 precondition/usage errors, 3 solver failures.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .errors import PreconditionError, SolverFailure
from .fields import Grid, ScalarField, write_field
from .harness import ANGLES, METHODS, ExperimentConfig, run_experiment
from .pdesolve import (
    SecondOrderProblem,
    solve_elliptic,
    solve_hyperbolic,
    solve_parabolic,
)
from .phantoms import phantom1, phantom2, potential_scalar, potential_vector
from .vlt import star_forward, vlt_forward

_FORWARD_KINDS = ("L", "T", "M", "L1", "T1", "M1", "S")
_KIND_MAP = {
    "L": ("long", 0),
    "T": ("trans", 0),
    "M": ("mixed", 0),
    "L1": ("long", 1),
    "T1": ("trans", 1),
    "M1": ("mixed", 1),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vlt",
        description="V-line and star transforms of symmetric 2-tensor fields: "
        "forward models, inversions, and reproducible experiments.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    ph = sub.add_parser("phantom", help="write a test field's components as CSV")
    ph.add_argument("--phantom", type=int, choices=(1, 2), default=1,
                    help="1 = smooth bumps, 2 = binary glyphs")
    ph.add_argument("--type", choices=("tensor", "scalar", "vector"),
                    default="tensor", help="tensor field, scalar or vector potential")
    ph.add_argument("--n", type=int, default=512, help="grid size")
    ph.add_argument("--out", default=".", help="output directory")

    fw = sub.add_parser("forward", help="compute one transform of a tensor phantom")
    fw.add_argument("--phantom", type=int, choices=(1, 2), default=1)
    fw.add_argument("--angle", choices=tuple(ANGLES), default=None,
                    help="branch direction angle (V-line transforms)")
    fw.add_argument("--star", action="store_true",
                    help="use the 3-branch star geometry (kind S)")
    fw.add_argument("--kind", choices=_FORWARD_KINDS, required=True,
                    help="L/T/M plain, L1/T1/M1 first-moment, S star")
    fw.add_argument("--n", type=int, default=512)
    fw.add_argument("--out", default=".")

    iv = sub.add_parser("invert", help="forward + optional noise + inversion, with errors")
    _add_experiment_flags(iv)
    iv.add_argument("--noise", type=float, default=0.0, help="noise percent")

    ex = sub.add_parser("experiment", help="multi-noise-level experiment with manifest")
    _add_experiment_flags(ex)
    ex.add_argument("--noise", default=None,
                    help="comma-separated noise percents, e.g. 0,5,10,20")
    ex.add_argument("--config", default=None,
                    help="flat key=value file; explicit flags win")

    sub.add_parser("pde-selftest",
                   help="manufactured-solution convergence orders of the solvers")
    return p


def _add_experiment_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--method", choices=METHODS, default=None)
    sp.add_argument("--phantom", type=int, choices=(1, 2), default=None)
    sp.add_argument("--angle", choices=tuple(ANGLES), default=None)
    sp.add_argument("--star", action="store_true",
                    help="star geometry (only for --method star)")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--mask-radius", type=float, default=None,
                    help="zero the star reconstruction outside this radius "
                    "(fraction of the grid extent)")
    sp.add_argument("--out", default=None, help="output directory")


def _cmd_phantom(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = Grid(args.n)
    smooth = args.phantom == 1
    written = []
    if args.type == "tensor":
        f = phantom1(grid) if smooth else phantom2(grid)
        for c in ("f11", "f12", "f22"):
            path = out / f"phantom{args.phantom}_{c}.csv"
            write_field(f.component(c), path)
            written.append(path)
    elif args.type == "scalar":
        phi = potential_scalar(grid, smooth=smooth)
        path = out / f"potential{args.phantom}_phi.csv"
        write_field(phi, path)
        written.append(path)
    else:
        g = potential_vector(grid, smooth=smooth)
        for k, c in ((0, "g1"), (1, "g2")):
            path = out / f"potential{args.phantom}_{c}.csv"
            write_field(g.component(k), path)
            written.append(path)
    for path in written:
        print(path)
    return 0


def _cmd_forward(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = Grid(args.n)
    f = phantom1(grid) if args.phantom == 1 else phantom2(grid)
    written = []
    if args.kind == "S":
        if not args.star:
            raise PreconditionError("kind S requires --star")
        from .fields import StarGeometry

        sd = star_forward(f, StarGeometry.three_branch())
        for name, comp in (
            ("star_long", sd.long_c),
            ("star_mixed", sd.mixed_c),
            ("star_trans", sd.trans_c),
        ):
            path = out / f"data_{name}.csv"
            write_field(comp, path)
            written.append(path)
    else:
        if args.star:
            raise PreconditionError(f"kind {args.kind} uses --angle, not --star")
        if args.angle is None:
            raise PreconditionError(f"kind {args.kind} requires --angle")
        from .fields import Direction, VLineGeometry

        a = ANGLES[args.angle]
        geom = VLineGeometry(Direction(math.cos(a), math.sin(a)))
        kind, moment = _KIND_MAP[args.kind]
        data = vlt_forward(f, geom, kind, moment=moment)
        path = out / f"data_{args.kind}.csv"
        write_field(data, path)
        written.append(path)
    for path in written:
        print(path)
    return 0


def _read_config_file(path: str) -> dict:
    cfg = {}
    text = Path(path).read_text()
    for i, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise PreconditionError(f"config {path}: line {i} is not key=value")
        k, _, v = line.partition("=")
        cfg[k.strip()] = v.strip()
    return cfg


def _build_config(args, noise_levels) -> ExperimentConfig:
    file_cfg = {}
    if getattr(args, "config", None):
        file_cfg = _read_config_file(args.config)

    def pick(flag_value, key, cast, default):
        if flag_value is not None:
            return flag_value
        if key in file_cfg:
            return cast(file_cfg[key])
        return default

    method = pick(args.method, "method", str, None)
    if method is None:
        raise PreconditionError("--method is required (flag or config file)")
    noise = noise_levels
    if noise is None and "noise" in file_cfg:
        noise = tuple(float(x) for x in file_cfg["noise"].split(",") if x.strip())
    if noise is None:
        noise = (0.0,)
    return ExperimentConfig(
        method=method,
        phantom=pick(args.phantom, "phantom", int, 1),
        angle=pick(args.angle, "angle", str, None),
        n=pick(args.n, "n", int, None),
        noise=noise,
        seed=pick(args.seed, "seed", int, 0),
        out_dir=pick(args.out, "out", str, "."),
        mask_radius=pick(args.mask_radius, "mask_radius", float, None),
    )


def _cmd_invert(args) -> int:
    cfg = _build_config(args, (float(args.noise),))
    manifest = run_experiment(cfg)
    for key, value in manifest.entries:
        if key.startswith("error."):
            print(f"{key[len('error.'):]} = {value}%")
    print(f"manifest: {manifest.path}")
    return 0


def _cmd_experiment(args) -> int:
    noise = None
    if args.noise is not None:
        noise = tuple(float(x) for x in str(args.noise).split(",") if x.strip())
    cfg = _build_config(args, noise)
    manifest = run_experiment(cfg)
    print(f"manifest: {manifest.path}")
    for key, value in manifest.entries:
        if key.startswith("error."):
            print(f"{key} = {value}")
    return 0


def _manufactured() -> tuple:
    """u(x,y) = (1-x^2)^4 (1-y^2)^4 and its exact second derivatives."""

    def p(t):
        return (1.0 - t**2) ** 4

    def pdd(t):
        return -8.0 * (1.0 - t**2) ** 3 + 48.0 * t**2 * (1.0 - t**2) ** 2

    def u(x, y):
        return p(x) * p(y)

    def uxx(x, y):
        return pdd(x) * p(y)

    def uyy(x, y):
        return p(x) * pdd(y)

    return u, uxx, uyy


def _pde_orders() -> dict[str, float]:
    """Observed convergence order per solver kind over n in {40, 80, 160}."""
    u, uxx, uyy = _manufactured()
    cases = {
        "elliptic": (1.0, 1.0, solve_elliptic),
        "parabolic": (1.0, 0.0, solve_parabolic),
        "hyperbolic": (1.0, -1.0, solve_hyperbolic),
    }
    orders = {}
    for kind, (a, b, solver) in cases.items():
        errs = []
        for n in (40, 80, 160):
            grid = Grid(n)
            xx, yy = grid.mesh()
            src = ScalarField(grid, -(a * uxx(xx, yy) + b * uyy(xx, yy)))
            sol = solver(SecondOrderProblem(grid, a=a, b=b, source=src))
            exact = u(xx, yy)
            errs.append(float(np.abs(sol.values - exact).max()))
        rates = [
            math.log(errs[i] / errs[i + 1]) / math.log(2.0)
            for i in range(len(errs) - 1)
        ]
        orders[kind] = min(rates)
    return orders


def _cmd_pde_selftest(args) -> int:
    thresholds = {"elliptic": 1.8, "parabolic": 0.8, "hyperbolic": 0.8}
    orders = _pde_orders()
    ok = True
    for kind, order in orders.items():
        need = thresholds[kind]
        passed = order >= need
        ok = ok and passed
        print(f"{kind}: observed order {order:.2f} (need >= {need}) "
              f"{'ok' if passed else 'FAIL'}")
    if not ok:
        raise SolverFailure("pde-selftest: convergence order below threshold")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "phantom": _cmd_phantom,
        "forward": _cmd_forward,
        "invert": _cmd_invert,
        "experiment": _cmd_experiment,
        "pde-selftest": _cmd_pde_selftest,
    }
    try:
        return handlers[args.command](args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
