#!/usr/bin/env python3
"""Toffoli depth of the increment adder vs register width.

Builds the teleportation-strategy adder for each width and measures its
depth on the constructed circuit; the per-gate lower-bound proxy column
is analytic.

    python scripts/adder_depth_scan.py --q-max 10
"""
import argparse
import sys

from teledepth.applications import adder_depth_table, adder_table_to_csv


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--q-max", type=int, default=10)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()
    if args.q_max < 3:
        parser.error("--q-max must be >= 3")
    text = adder_table_to_csv(adder_depth_table(range(3, args.q_max + 1)))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
