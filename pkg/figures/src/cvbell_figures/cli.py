"""Command line entry: render cvbell CSV outputs to images.

    cvbell-figures plot-sweep <in.csv> <out-image>
    cvbell-figures plot-convergence <in.csv> <out-image>

Exit codes: 0 success, 2 bad arguments or unparseable input.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .plots import plot_convergence, plot_sweep
from .tables import ParseError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvbell-figures",
        description="Render cvbell CSV outputs as figures.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("plot-sweep", help="B_max versus percentage squeezing")
    p.add_argument("csv", help="sweep CSV produced by `cvbell sweep`")
    p.add_argument("out", help="output image path (png)")

    p = subs.add_parser("plot-convergence", help="estimator deviation versus window count")
    p.add_argument("csv", help="estimate-report CSV produced by `cvbell simulate`")
    p.add_argument("out", help="output image path (png)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "plot-sweep":
            summary = plot_sweep(args.csv, args.out)
            print(f"wrote {args.out}: {summary.points} points, "
                  f"reference line at B = {summary.reference_line}")
        else:
            summary = plot_convergence(args.csv, args.out)
            print(f"wrote {args.out}: {summary.points} points, "
                  f"guide slope {summary.guide_slope}")
        return 0
    except (ParseError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
