"""Command-line chart renderer for sweep CSV files.

Exit codes: 0 success, 1 usage error, 2 bad input (missing file or columns).
"""

from __future__ import annotations

import argparse
import sys

from .render import GROUP_COLUMNS, PlotSpec, SchemaError, render

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aircomp-plot", description=__doc__)
    parser.add_argument("--csv", required=True, help="sweep results CSV path")
    parser.add_argument(
        "--group-by", required=True, choices=GROUP_COLUMNS,
        help="column distinguishing the lines besides the scheme",
    )
    parser.add_argument("--out", required=True, help="output image path (png, pdf, svg)")
    parser.add_argument(
        "--linear-y", action="store_true", help="linear y-axis (default: log scale)"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = PlotSpec(
            csv_path=args.csv,
            group_by=args.group_by,
            output_image_path=args.out,
            log_y=not args.linear_y,
        )
        render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
