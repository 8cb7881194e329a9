"""Command line entry point.

    lohh-figures runtime-sweep --input sweep.tsv --theory theory.tsv --out fig.png
    lohh-figures tau-trace --input tau.tsv --envelope tau_max.tsv --out fig.png
    lohh-figures usage --input usage.tsv --out fig.png

Exit code 2 for a bad invocation, 1 when an input file is missing or
malformed.
"""

import argparse
import sys
from pathlib import Path

from .io import AlignmentError, ColumnError
from .render import KINDS, FigureSpec, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lohh-figures",
        description="Render charts from the TSV files the lohh tool writes.",
    )
    parser.add_argument("kind", choices=KINDS, help="which chart to draw")
    parser.add_argument("--input", required=True, type=Path,
                        help="main data TSV")
    parser.add_argument("--theory", type=Path,
                        help="theory table (runtime-sweep reference lines)")
    parser.add_argument("--envelope", type=Path,
                        help="tau_max table (tau-trace upper bound)")
    parser.add_argument("--out", required=True, type=Path,
                        help="output PNG path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(kind=args.kind, input=args.input, out=args.out,
                          theory=args.theory, envelope=args.envelope)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    try:
        out = render(spec)
    except (ColumnError, AlignmentError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
