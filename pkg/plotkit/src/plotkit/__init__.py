"""Figure-montage renderer for experiment artifacts.

Consumes the two documented text formats -- grid CSV files and flat
key=value run manifests -- and renders montage PNGs (originals,
reconstructions per noise level, differences) with colorbars.  It never
imports the package that produced the artifacts and never modifies
them.
"""

from .errors import PlotkitError
from .gridio import read_grid, read_manifest
from .render import render_run

__all__ = ["PlotkitError", "read_grid", "read_manifest", "render_run"]
