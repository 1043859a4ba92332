"""lppplot command line: render tail and variance figures from lpplab CSVs.

Exit status: 0 on success, 1 on malformed input (message carries the line
number), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .figures import MODES, FigureSpec, render_tail, render_variance


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lppplot", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    tail = subs.add_parser("tail", help="exceedance curves with CI whiskers and fit overlays")
    tail.add_argument("csv", nargs="+", help="tail CSV file(s); overlaid with distinct markers")
    tail.add_argument("--mode", choices=MODES, default="semilogy")
    tail.add_argument("--no-guides", action="store_true", help="suppress slope guide lines")
    tail.add_argument("--title", default=None)
    tail.add_argument("-o", "--out", required=True, help="output image path (.svg, .pdf, .png)")

    var = subs.add_parser("variance", help="log-log variance scaling with slope-2/3 guide")
    var.add_argument("csv", help="variance CSV file")
    var.add_argument("--title", default=None)
    var.add_argument("-o", "--out", required=True)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "tail":
            spec = FigureSpec(
                inputs=list(args.csv),
                output=args.out,
                mode=args.mode,
                guides=not args.no_guides,
                title=args.title,
            )
            path = render_tail(spec)
        else:
            spec = FigureSpec(inputs=[args.csv], output=args.out, title=args.title)
            path = render_variance(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
