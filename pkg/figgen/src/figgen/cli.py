"""Command line: ``figgen <csv_path> --kind <figure_kind> --out <image_path>``."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, FiggenError, FigureRequest, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figgen", description="Render a figure from a simulator sweep CSV."
    )
    parser.add_argument("csv_path", help="sweep CSV produced by the simulator")
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        path = render(FigureRequest(args.csv_path, args.kind, args.out))
    except (FiggenError, OSError) as err:
        print(f"figgen: {err}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
