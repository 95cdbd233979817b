"""Run the three preset scenarios and collect their CSV/summary outputs.

Usage: python3 scripts/run_figures.py [--outdir results] [--kicks N]
"""

import argparse
import pathlib
import sys

from springkick.cli import main as cli_main
from springkick.runner import SCENARIO_NAMES


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results", help="output directory")
    parser.add_argument("--kicks", type=int, default=None, help="override n_kicks")
    parser.add_argument(
        "--scenarios",
        nargs="+",
        default=list(SCENARIO_NAMES),
        choices=SCENARIO_NAMES,
        help="subset to run",
    )
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in args.scenarios:
        argv = ["--scenario", name, "--out", str(outdir / name), "--quiet"]
        if args.kicks is not None:
            argv += ["--kicks", str(args.kicks)]
        print(f"running {name} ...")
        code = cli_main(argv)
        if code != 0:
            print(f"{name} failed with exit code {code}", file=sys.stderr)
            return code
        print(f"  -> {outdir / name}.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
