"""Noise injection, error metrics, and experiment orchestration.

``run_experiment`` reproduces the full measure-and-reconstruct pipeline
for any of the nine reconstruction methods: build a phantom, compute its
forward transforms, optionally add seeded Gaussian noise at several
levels, invert, and persist every grid (CSV), a preview of every grid
(PGM, per-image min-max scaling), and a flat key=value manifest with the
per-component relative errors.

Determinism contract: for a fixed config and seed the numeric artifacts
and every non-timing manifest line are identical across runs, including
when noise levels are processed in parallel -- each level draws from its
own random stream keyed by (seed, level index), and each data field
consumes that stream in a fixed order.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .calculus import d2, ddperp, dperp2, perp_sym_deriv, sym_deriv
from .errors import FieldFormatError, GridError, PreconditionError
from .fields import (
    Direction,
    Grid,
    ScalarField,
    StarGeometry,
    VLineGeometry,
    write_field,
)
from .inversion import (
    invert_LL1M,
    invert_LL1T,
    invert_LTM,
    invert_d2phi,
    invert_ddperpphi,
    invert_dg,
    invert_dperp2phi,
    invert_dperpg,
    invert_star,
)
from .phantoms import phantom1, phantom2, potential_scalar, potential_vector
from .vlt import StarData, star_forward, vlt_forward

METHODS = (
    "d2phi",
    "dperp2phi",
    "ddperpphi",
    "dg",
    "dperpg",
    "ltm",
    "ll1t",
    "ll1m",
    "star",
)

ANGLES = {
    "pi/3": math.pi / 3.0,
    "pi/4": math.pi / 4.0,
    "pi/6": math.pi / 6.0,
}

_NOISE_CONVENTION = (
    "additive Gaussian, sigma=(percent/100)*RMS(data), stream per (seed, level)"
)

# Methods whose pipeline includes a finite-difference solve run at a
# coarser default resolution than the purely explicit ones.
_PDE_METHODS = {"ddperpphi", "dg", "dperpg"}


def add_noise(data: ScalarField, percent: float, seed: int) -> ScalarField:
    """Additive Gaussian noise scaled to the data: sigma = (percent/100) * RMS.

    Deterministic for a fixed seed; percent = 0 returns the data unchanged.
    """
    rng = np.random.default_rng(seed)
    return _add_noise_rng(data, percent, rng)


def _add_noise_rng(
    data: ScalarField, percent: float, rng: np.random.Generator
) -> ScalarField:
    if not (float(percent) >= 0.0):
        raise PreconditionError(f"noise percent must be >= 0, got {percent}")
    if percent == 0.0:
        return ScalarField(data.grid, data.values.copy())
    sigma = (percent / 100.0) * float(np.sqrt(np.mean(data.values**2)))
    eps = rng.normal(0.0, sigma, size=data.values.shape)
    return ScalarField(data.grid, data.values + eps)


def relative_error_spectral(a, b) -> float:
    """Relative error in percent under the spectral (largest singular value) norm.

    ``100 * ||a - b||_2 / ||a||_2``; accepts scalar fields or plain 2-D
    arrays.  A zero reference is an error (the ratio is undefined).
    """
    av, bv = _as_matrix(a), _as_matrix(b)
    if isinstance(a, ScalarField) and isinstance(b, ScalarField) and a.grid != b.grid:
        raise GridError("relative_error_spectral: fields live on different grids")
    if av.shape != bv.shape:
        raise GridError(
            f"relative_error_spectral: shape mismatch {av.shape} vs {bv.shape}"
        )
    norm_a = np.linalg.norm(av, 2)
    if norm_a == 0.0:
        raise PreconditionError("relative_error_spectral: zero reference field")
    return 100.0 * float(np.linalg.norm(av - bv, 2) / norm_a)


def _as_matrix(x) -> np.ndarray:
    vals = x.values if isinstance(x, ScalarField) else np.asarray(x, dtype=float)
    if vals.ndim != 2:
        raise GridError(f"expected a 2-D array, got shape {vals.shape}")
    return vals


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one reconstruction experiment.

    ``n`` defaults per method: 160 where a finite-difference solve is
    involved (ddperpphi, dg, dperpg, and ltm away from pi/4), 512 for the
    purely explicit and star pipelines.
    """

    method: str
    phantom: int = 1
    angle: str | None = None
    n: int | None = None
    noise: tuple[float, ...] = (0.0,)
    seed: int = 0
    out_dir: str = "."
    mask_radius: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise PreconditionError(
                f"unknown method {self.method!r}; choose from {', '.join(METHODS)}"
            )
        if self.phantom not in (1, 2):
            raise PreconditionError(f"phantom must be 1 or 2, got {self.phantom}")
        if self.method == "star":
            if self.angle is not None:
                raise PreconditionError("method 'star' uses the star geometry, not an angle")
        else:
            if self.angle not in ANGLES:
                raise PreconditionError(
                    f"method {self.method!r} needs --angle from {', '.join(ANGLES)}"
                )
        levels = tuple(float(p) for p in self.noise)
        if not levels:
            raise PreconditionError("noise list must contain at least one level")
        for p in levels:
            if not (p >= 0.0):
                raise PreconditionError(f"noise percent must be >= 0, got {p}")
        object.__setattr__(self, "noise", levels)
        if self.n is None:
            object.__setattr__(self, "n", self._default_n())
        if int(self.n) < 16:
            raise PreconditionError(f"grid size n={self.n} is too small (need >= 16)")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "out_dir", str(self.out_dir))

    def _default_n(self) -> int:
        if self.method in _PDE_METHODS:
            return 160
        if self.method == "ltm" and self.angle != "pi/4":
            return 160
        return 512

    def geometry(self) -> VLineGeometry | StarGeometry:
        if self.method == "star":
            return StarGeometry.three_branch()
        a = ANGLES[self.angle]
        return VLineGeometry(Direction(math.cos(a), math.sin(a)))


@dataclass(frozen=True)
class RunManifest:
    """Flat, ordered key=value record of one experiment run."""

    path: Path
    entries: tuple[tuple[str, str], ...]

    def text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.entries)

    def get(self, key: str) -> str | None:
        for k, v in self.entries:
            if k == key:
                return v
        return None

    def errors(self) -> dict[str, float]:
        return {
            k[len("error."):]: float(v)
            for k, v in self.entries
            if k.startswith("error.")
        }

    def files(self) -> list[Path]:
        base = self.path.parent
        return [
            base / v
            for k, v in self.entries
            if k.startswith("file.") or k.startswith("preview.")
        ]

    def write(self) -> None:
        missing = [str(p) for p in self.files() if not p.is_file()]
        if missing:
            raise FieldFormatError(
                "manifest lists files that do not exist: " + ", ".join(missing)
            )
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(self.text())

    @classmethod
    def read(cls, path) -> "RunManifest":
        p = Path(path)
        entries = []
        for i, line in enumerate(p.read_text().splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if "=" not in line:
                raise FieldFormatError(f"manifest {p}: line {i} is not key=value")
            k, _, v = line.partition("=")
            entries.append((k.strip(), v.strip()))
        return cls(path=p, entries=tuple(entries))


def _write_pgm(path: Path, values: np.ndarray) -> None:
    """8-bit PGM preview; linear min-max scaling, y rendered top-down."""
    vmin = float(values.min())
    vmax = float(values.max())
    if vmax > vmin:
        scaled = np.round((values - vmin) / (vmax - vmin) * 255.0)
    else:
        scaled = np.zeros_like(values)
    raster = scaled.astype(np.uint8).T[::-1, :]  # rows = descending y
    with open(path, "wb") as fh:
        fh.write(f"P5\n{raster.shape[1]} {raster.shape[0]}\n255\n".encode())
        fh.write(raster.tobytes())


class _Artifacts:
    """Accumulates manifest entries and persists grids as CSV + PGM."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.entries: list[tuple[str, str]] = []

    def add(self, key: str, value) -> None:
        self.entries.append((key, str(value)))

    def save_grid(self, tag: str, name: str, f: ScalarField) -> None:
        stem = f"{tag}_{name}".replace(".", "_")
        csv_path = self.out_dir / f"{stem}.csv"
        pgm_path = self.out_dir / f"{stem}.pgm"
        write_field(f, csv_path)
        _write_pgm(pgm_path, f.values)
        self.add(f"file.{tag}.{name}", csv_path.name)
        self.add(f"preview.{tag}.{name}", pgm_path.name)


def _make_targets_and_data(cfg: ExperimentConfig, grid: Grid):
    """Phantom + forward transforms for a method.

    Returns (targets, data): ``targets`` maps the names of the fields the
    method reconstructs to their ground truth; ``data`` maps transform
    names to the forward data fields.
    """
    smooth = cfg.phantom == 1
    geom = cfg.geometry()
    if cfg.method in ("d2phi", "dperp2phi", "ddperpphi"):
        phi = potential_scalar(grid, smooth=smooth)
        f = {"d2phi": d2, "dperp2phi": dperp2, "ddperpphi": ddperp}[cfg.method](phi)
        kinds = {
            "d2phi": ("long", "mixed"),
            "dperp2phi": ("trans", "mixed"),
            "ddperpphi": ("long", "trans", "mixed"),
        }[cfg.method]
        data = {k: vlt_forward(f, geom, k) for k in kinds}
        return {"phi": phi}, data
    if cfg.method in ("dg", "dperpg"):
        g = potential_vector(grid, smooth=smooth)
        if cfg.method == "dg":
            f = sym_deriv(g)
            data = {k: vlt_forward(f, geom, k) for k in ("long", "mixed")}
        else:
            f = perp_sym_deriv(g)
            data = {k: vlt_forward(f, geom, k) for k in ("trans", "mixed")}
        return {"g1": g.component(0), "g2": g.component(1)}, data
    f = phantom1(grid) if smooth else phantom2(grid)
    targets = {c: f.component(c) for c in ("f11", "f12", "f22")}
    if cfg.method == "star":
        sd = star_forward(f, geom)
        data = {
            "star_long": sd.long_c,
            "star_mixed": sd.mixed_c,
            "star_trans": sd.trans_c,
        }
        return targets, data
    kinds = {
        "ltm": ("long", "trans", "mixed"),
        "ll1t": ("long", "long1", "trans"),
        "ll1m": ("long", "long1", "mixed"),
    }[cfg.method]
    data = {}
    for k in kinds:
        base, moment = (k[:-1], 1) if k.endswith("1") else (k, 0)
        data[k] = vlt_forward(f, geom, base, moment=moment)
    return targets, data


def _invert(cfg: ExperimentConfig, data: dict) -> dict:
    """Run the method's inversion on (possibly noisy) data fields."""
    geom = cfg.geometry()
    m = cfg.method
    if m == "d2phi":
        return {
            "phi_from_L": invert_d2phi(data["long"], geom, src="L"),
            "phi_from_M": invert_d2phi(data["mixed"], geom, src="M"),
        }
    if m == "dperp2phi":
        return {
            "phi_from_T": invert_dperp2phi(data["trans"], geom, src="T"),
            "phi_from_M": invert_dperp2phi(data["mixed"], geom, src="M"),
        }
    if m == "ddperpphi":
        return {
            "phi_from_L": invert_ddperpphi(dataL=data["long"], geom=geom),
            "phi_from_T": invert_ddperpphi(dataT=data["trans"], geom=geom),
            "phi_from_M": invert_ddperpphi(dataM=data["mixed"], geom=geom),
        }
    if m == "dg":
        g = invert_dg(data["long"], data["mixed"], geom)
        return {"g1": g.component(0), "g2": g.component(1)}
    if m == "dperpg":
        g = invert_dperpg(data["trans"], data["mixed"], geom)
        return {"g1": g.component(0), "g2": g.component(1)}
    if m == "star":
        sd = StarData(
            long_c=data["star_long"],
            mixed_c=data["star_mixed"],
            trans_c=data["star_trans"],
        )
        rec = invert_star(sd, geom, mask_radius=cfg.mask_radius)
        return {c: rec.component(c) for c in ("f11", "f12", "f22")}
    if m == "ltm":
        rec = invert_LTM(data["long"], data["trans"], data["mixed"], geom)
    elif m == "ll1t":
        rec = invert_LL1T(data["long"], data["long1"], data["trans"], geom)
    else:
        rec = invert_LL1M(data["long"], data["long1"], data["mixed"], geom)
    return {c: rec.component(c) for c in ("f11", "f12", "f22")}


def _target_of(rec_name: str) -> str:
    """Map a reconstruction name to the target it approximates."""
    return rec_name.split("_from_")[0]


def _workers(n_tasks: int) -> int:
    cap = os.environ.get("VLT_THREADS", "").strip()
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_tasks, limit))


def run_experiment(cfg: ExperimentConfig) -> RunManifest:
    """Phantom -> forward -> noise -> invert -> errors, all persisted.

    Grids are written as CSV with PGM previews; the manifest (one
    key=value per line) echoes the config, lists every file, and records
    the per-component relative errors and stage timings.  Noise levels
    run in parallel (capped by the VLT_THREADS environment variable);
    any stage failure is recorded in the manifest before the exception
    propagates.
    """
    t_total = time.perf_counter()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    art = _Artifacts(out_dir)
    art.add("schema", "vlt-manifest-1")
    art.add("method", cfg.method)
    art.add("phantom", cfg.phantom)
    art.add("n", cfg.n)
    if cfg.method == "star":
        art.add("geometry", "star-3-branch-unit")
        if cfg.mask_radius is not None:
            art.add("mask_radius", f"{cfg.mask_radius:g}")
    else:
        art.add("angle", cfg.angle)
    art.add("seed", cfg.seed)
    art.add("levels", len(cfg.noise))
    for i, p in enumerate(cfg.noise):
        art.add(f"level{i}.percent", f"{p:g}")
    art.add("noise_convention", _NOISE_CONVENTION)
    manifest_path = out_dir / "manifest.txt"

    try:
        grid = Grid(cfg.n)
        t0 = time.perf_counter()
        targets, data = _make_targets_and_data(cfg, grid)
        forward_s = time.perf_counter() - t0
        for name in sorted(targets):
            art.save_grid("original", name, targets[name])
        for name in sorted(data):
            art.save_grid("data", name, data[name])

        def run_level(idx: int):
            t1 = time.perf_counter()
            rng = np.random.default_rng((cfg.seed, idx))
            noisy = {
                k: _add_noise_rng(data[k], cfg.noise[idx], rng) for k in sorted(data)
            }
            recs = _invert(cfg, noisy)
            errors = {
                name: relative_error_spectral(targets[_target_of(name)], rec)
                for name, rec in recs.items()
            }
            return recs, errors, time.perf_counter() - t1

        with ThreadPoolExecutor(max_workers=_workers(len(cfg.noise))) as pool:
            results = list(pool.map(run_level, range(len(cfg.noise))))

        for idx, (recs, errors, _) in enumerate(results):
            for name in sorted(recs):
                art.save_grid(f"level{idx}_rec", name, recs[name])
        for idx, (_, errors, _) in enumerate(results):
            for name in sorted(errors):
                art.add(f"error.level{idx}.{name}", f"{errors[name]:.4f}")
        art.add("time.forward_s", f"{forward_s:.3f}")
        for idx, (_, _, secs) in enumerate(results):
            art.add(f"time.level{idx}_s", f"{secs:.3f}")
        art.add("time.total_s", f"{time.perf_counter() - t_total:.3f}")
        art.add("status", "ok")
        manifest = RunManifest(path=manifest_path, entries=tuple(art.entries))
        manifest.write()
        return manifest
    except Exception as exc:
        art.add("status", "error")
        art.add("error.type", type(exc).__name__)
        art.add("error.message", str(exc).replace("\n", " "))
        failed = RunManifest(path=manifest_path, entries=tuple(art.entries))
        manifest_path.parent.mkdir(parents=True, exist_ok=True)
        manifest_path.write_text(failed.text())
        raise
