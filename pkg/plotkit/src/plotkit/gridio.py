"""Readers for the two text formats the renderer consumes.

Grid CSV: a ``n=<n> order=y-ascending`` header line, then n rows of n
comma-separated values; row j holds the field over ascending x at the
j-th y value, so the parsed array is indexed ``[y, x]`` and renders
upright with a lower origin.

Run manifest: flat ``key=value`` lines (blank lines and ``#`` comments
ignored).  Keys ``file.<tag>.<name>`` point at grid CSVs relative to the
manifest's directory.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import PlotkitError


def read_grid(path) -> np.ndarray:
    """Parse a grid CSV into an (n, n) array indexed [y, x]."""
    p = Path(path)
    if not p.is_file():
        raise PlotkitError(f"grid file does not exist: {p}")
    with open(p, "r", encoding="ascii") as fh:
        header = fh.readline()
        if not header:
            raise PlotkitError(f"{p}: empty file")
        n = None
        for tok in header.strip().replace(",", " ").split():
            if tok.startswith("n="):
                try:
                    n = int(tok[2:])
                except ValueError:
                    raise PlotkitError(f"{p}: bad grid size {tok!r} in header") from None
            elif tok.startswith("order=") and tok != "order=y-ascending":
                raise PlotkitError(f"{p}: unsupported row order {tok!r}")
        if n is None or n <= 0:
            raise PlotkitError(f"{p}: header must contain n=<positive int>")
        rows = []
        for j in range(n):
            line = fh.readline()
            if not line:
                raise PlotkitError(f"{p}: expected {n} data rows, file ends after {j}")
            parts = line.strip().split(",")
            if len(parts) != n:
                raise PlotkitError(f"{p}: row {j + 2} has {len(parts)} values, expected {n}")
            try:
                rows.append([float(v) for v in parts])
            except ValueError:
                raise PlotkitError(f"{p}: row {j + 2} contains a non-numeric value") from None
    values = np.array(rows)
    if not np.all(np.isfinite(values)):
        raise PlotkitError(f"{p}: grid contains non-finite values")
    return values


def read_manifest(path) -> list[tuple[str, str]]:
    """Parse a flat key=value manifest, preserving order."""
    p = Path(path)
    if not p.is_file():
        raise PlotkitError(f"manifest does not exist: {p}")
    entries = []
    for i, line in enumerate(p.read_text().splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "=" not in line:
            raise PlotkitError(f"{p}: line {i} is not key=value")
        k, _, v = line.partition("=")
        entries.append((k.strip(), v.strip()))
    return entries
