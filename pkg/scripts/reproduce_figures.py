"""Write the curves of every preset figure as CSV files.

    python scripts/reproduce_figures.py --output-dir out/
"""
import argparse
import sys

from oscillator_laser.cli import run
from oscillator_laser.experiments import FigureId


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--output-dir", default="figures")
    args = ap.parse_args()
    status = 0
    for fig in FigureId:
        status = max(status, run(["figure", "--id", fig.value, "--output-dir", args.output_dir]))
    return status


if __name__ == "__main__":
    sys.exit(main())
