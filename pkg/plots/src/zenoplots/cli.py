"""Command line wrapper: render --kind fig2|fig3 --in data.csv --out fig.svg"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .figures import FigureSpec, SchemaError, render


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render zenomem sweep CSV files as figures",
    )
    parser.add_argument("--kind", required=True, choices=("fig2", "fig3"),
                        help="which CSV schema and figure layout to use")
    parser.add_argument("--in", dest="csv", required=True, type=Path,
                        metavar="CSV", help="input CSV written by zenomem run")
    parser.add_argument("--out", required=True, type=Path,
                        help="output image path (.svg or .png)")
    parser.add_argument("--x-scale", choices=("linear", "log"), default=None)
    parser.add_argument("--y-scale", choices=("linear", "log"), default=None)
    args = parser.parse_args(argv)

    try:
        spec = FigureSpec(
            csv_path=args.csv,
            kind=args.kind,
            out_path=args.out,
            x_scale=args.x_scale,
            y_scale=args.y_scale,
        )
        written = render(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {written}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
