"""Command line for rendering solution-set figures.

Usage: setplot DUS CDUS PF CH --out figure.png [--format {png,svg}]
"""

from __future__ import annotations

import argparse
import sys

from .render import plot_solution_sets


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setplot",
        description="Scatter plot of solution-set membership from JSON files",
    )
    parser.add_argument("dus", help="distributional undominated set JSON")
    parser.add_argument("cdus", help="convex distributional undominated set JSON")
    parser.add_argument("pf", help="Pareto front JSON")
    parser.add_argument("ch", help="convex hull JSON")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--format", choices=["png", "svg"], default="png")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = plot_solution_sets(
            args.dus, args.cdus, args.pf, args.ch, args.out, fmt=args.format
        )
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    counts = report["inputs"]
    print(
        f"{args.out}: dus={counts['dus']} cdus={counts['cdus']} "
        f"pf={counts['pf']} ch={counts['ch']}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
