"""Montage rendering from a run manifest.

One experiment produces up to three montages:

* ``montage_fields.png``      -- originals row, then one reconstruction
  row per noise level;
* ``montage_data.png``        -- the measured data fields;
* ``montage_differences.png`` -- reconstruction minus original, per
  level, for every reconstruction whose name maps onto an original
  (``phi_from_L`` maps to ``phi``, ``f11`` to ``f11``).

Color scaling is per-image by default; in shared mode every panel of a
montage uses one range -- the min/max over all its images -- and a
single colorbar.  The colormap name, the scale mode, and (in shared
mode) the range are recorded in the PNG metadata, and output is
deterministic for fixed inputs.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import PlotkitError
from .gridio import read_grid, read_manifest

COLORMAP = "viridis"
DPI = 100


def _grids_of(entries, base):
    """Map manifest file entries to loaded grids, grouped by tag."""
    originals: dict[str, np.ndarray] = {}
    data: dict[str, np.ndarray] = {}
    recs: dict[int, dict[str, np.ndarray]] = {}
    for key, value in entries:
        if not key.startswith("file."):
            continue
        _, tag, name = key.split(".", 2)
        grid = read_grid(base / value)
        if tag == "original":
            originals[name] = grid
        elif tag == "data":
            data[name] = grid
        elif tag.startswith("level") and tag.endswith("_rec"):
            level = int(tag[len("level"):-len("_rec")])
            recs.setdefault(level, {})[name] = grid
    return originals, data, recs


def _level_label(entries, level):
    for key, value in entries:
        if key == f"level{level}.percent":
            return f"rec {value}% noise"
    return f"rec level {level}"


def _suptitle(entries):
    echo = dict(entries)
    parts = []
    if "method" in echo:
        parts.append(echo["method"])
    if "phantom" in echo:
        parts.append(f"phantom {echo['phantom']}")
    if "n" in echo:
        parts.append(f"n={echo['n']}")
    return "  ".join(parts)


def _montage(rows, row_labels, out_path, title, shared_scale):
    """Render rows of (name, values) panels into one figure with colorbars."""
    ncols = max(len(r) for r in rows)
    nrows = len(rows)
    fig, axes = plt.subplots(
        nrows, ncols,
        figsize=(2.6 * ncols + (1.0 if shared_scale else 0.0), 2.8 * nrows),
        squeeze=False,
    )
    vmin = vmax = None
    if shared_scale:
        vmin = min(float(v.min()) for row in rows for _, v in row)
        vmax = max(float(v.max()) for row in rows for _, v in row)
    last_image = None
    for r, row in enumerate(rows):
        for c in range(ncols):
            ax = axes[r][c]
            if c >= len(row):
                ax.set_axis_off()
                continue
            name, values = row[c]
            last_image = ax.imshow(
                values, origin="lower", cmap=COLORMAP, vmin=vmin, vmax=vmax
            )
            ax.set_title(name, fontsize=9)
            ax.set_xticks([])
            ax.set_yticks([])
            if c == 0:
                ax.set_ylabel(row_labels[r], fontsize=9)
            if not shared_scale:
                fig.colorbar(last_image, ax=ax, fraction=0.046, pad=0.04)
    if shared_scale:
        fig.colorbar(
            last_image, ax=[a for row in axes for a in row], fraction=0.02, pad=0.02
        )
    if title:
        fig.suptitle(title, fontsize=11)
    metadata = {
        "Title": f"{title} {out_path.stem}".strip(),
        "Colormap": COLORMAP,
        "ScaleMode": "shared" if shared_scale else "per-image",
    }
    if shared_scale:
        metadata["ScaleRange"] = f"{vmin!r}:{vmax!r}"
    fig.savefig(out_path, dpi=DPI, metadata=metadata)
    plt.close(fig)


def render_run(manifest_path, out_dir, *, shared_scale: bool = False) -> list[Path]:
    """Render the montage set for one experiment manifest.

    Returns the list of written image files; a manifest listing no grids
    renders nothing and warns instead.
    """
    manifest_path = Path(manifest_path)
    out = Path(out_dir)
    entries = read_manifest(manifest_path)
    originals, data, recs = _grids_of(entries, manifest_path.parent)
    if not originals and not data and not recs:
        warnings.warn(f"{manifest_path}: no grid files listed; nothing to render")
        return []
    out.mkdir(parents=True, exist_ok=True)
    title = _suptitle(entries)
    written = []

    rows, labels = [], []
    if originals:
        rows.append(sorted(originals.items()))
        labels.append("original")
    for level in sorted(recs):
        rows.append(sorted(recs[level].items()))
        labels.append(_level_label(entries, level))
    if rows:
        path = out / "montage_fields.png"
        _montage(rows, labels, path, title, shared_scale)
        written.append(path)

    if data:
        path = out / "montage_data.png"
        _montage([sorted(data.items())], ["data"], path, title, shared_scale)
        written.append(path)

    diff_rows, diff_labels = [], []
    for level in sorted(recs):
        row = []
        for name, values in sorted(recs[level].items()):
            target = name.split("_from_")[0]
            if target in originals and originals[target].shape == values.shape:
                row.append((f"{name} - {target}", values - originals[target]))
        if row:
            diff_rows.append(row)
            diff_labels.append(_level_label(entries, level))
    if diff_rows:
        path = out / "montage_differences.png"
        _montage(diff_rows, diff_labels, path, title, shared_scale)
        written.append(path)

    return written
