"""Command line: ``plotkit render --manifest <path> --out <dir> [--shared-scale]``.

Exit codes: 0 success, 2 missing or malformed inputs.
"""

from __future__ import annotations

import argparse
import sys

from .errors import PlotkitError
from .render import render_run


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figure montages from an experiment manifest of grid CSVs.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render the montage set for one manifest")
    r.add_argument("--manifest", required=True, help="path to a run manifest")
    r.add_argument("--out", required=True, help="output directory for PNGs")
    r.add_argument("--shared-scale", action="store_true",
                   help="one color range and colorbar per montage "
                   "(min/max over all its images) instead of per-image scaling")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = render_run(args.manifest, args.out, shared_scale=args.shared_scale)
    except PlotkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
