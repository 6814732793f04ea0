"""Command line: figplots <kind> --in <csv...> --out <image>."""
from __future__ import annotations

import argparse
import sys

from .csvio import EmptyData, MissingColumn
from .render import KINDS, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figplots",
        description="Render simulator CSV tables as static figures")
    parser.add_argument("kind", choices=KINDS,
                        help="figure family to render")
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        metavar="CSV", help="input table(s)")
    parser.add_argument("--out", required=True, metavar="IMG",
                        help="output image (.png or .svg)")
    parser.add_argument("--log-time", action="store_true",
                        help="logarithmic time axis (population plots)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(kind=args.kind, inputs=tuple(args.inputs),
                    output=args.out, log_time=args.log_time)
    try:
        render(spec)
    except (MissingColumn, EmptyData, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
