#!/usr/bin/env python3
"""Cost table across decomposition methods (depth / count / ancillas vs n).

    python scripts/make_comparison_table.py --n-max 20 --out comparison.csv

Cells whose values are published only as plotted curves are left empty.
"""
import argparse
import sys

from teledepth.comparisons import comparison_table, table_to_csv


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--n-max", type=int, default=20)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()
    text = table_to_csv(comparison_table(range(2, args.n_max + 1)))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
