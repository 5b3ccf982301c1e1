"""Render figures from difflab run outputs.

    difflab-plots run-dir out/thm_v0_pme --out figs/
    difflab-plots series --csv a.csv --csv b.csv --model power \
        --reference -1.8 --out fig.png
"""
from __future__ import annotations

import argparse
import sys

from .plotting import PlotInputError, PlotSpec, plot_run_dir, plot_series


def build_parser():
    parser = argparse.ArgumentParser(prog="difflab-plots", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-dir", help="render every fit/bound of a run directory")
    p.add_argument("run_dir")
    p.add_argument("--out", default="figs")
    p.set_defaults(cmd="run-dir")

    p = sub.add_parser("series", help="render explicit series (overlay allowed)")
    p.add_argument("--csv", action="append", required=True)
    p.add_argument("--model", choices=("power", "exponential"), required=True)
    p.add_argument("--reference", type=float)
    p.add_argument("--scale-by-t", action="store_true")
    p.add_argument("--label", action="append", default=[])
    p.add_argument("--out", required=True)
    p.set_defaults(cmd="series")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "run-dir":
            images = plot_run_dir(args.run_dir, args.out)
            for path in images:
                print(path)
        else:
            spec = PlotSpec(csv_paths=tuple(args.csv), model=args.model,
                            reference=args.reference, out_path=args.out,
                            labels=tuple(args.label), scale_by_t=args.scale_by_t)
            print(plot_series(spec))
        return 0
    except PlotInputError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
