"""Scan <x^2, x^2 + c> over rational c and compare with (1/2) h(c) - log 3 and (1/2) h(c) + log 2.

Writes a CSV with one row per c.

    python scripts/quadratic_bracket_scan.py --out bracket.csv --samples 5000
"""
import argparse
import csv
import sys
import warnings
from fractions import Fraction

from azpair import RunConfig, pairing_via_theorem1, quad_family_bounds
from azpair.polynomial import PolyQ


def grid(limit):
    out = set()
    for num in range(-limit, limit + 1):
        for den in (1, 2, 3):
            out.add(Fraction(num, den))
    return sorted(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--limit", type=int, default=8, help="numerators run over [-limit, limit]")
    ap.add_argument("--samples", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = ap.parse_args()

    cfg = RunConfig(samples=args.samples, seed=args.seed)
    writer = csv.writer(args.out)
    writer.writerow(["c", "lower", "pairing", "error", "upper", "inside", "equality_case"])
    misses = 0
    for c in grid(args.limit):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            r = pairing_via_theorem1(PolyQ([c, 0, 1]), cfg)
        b = quad_family_bounds(c)
        inside = b.lower - r.error_radius <= r.value <= b.upper + r.error_radius
        misses += not inside
        writer.writerow([str(c), f"{b.lower:.6f}", f"{r.value:.6f}", f"{r.error_radius:.6f}",
                         f"{b.upper:.6f}", inside, r.equality_case.value])
    print(f"{misses} values outside the bracket", file=sys.stderr)


if __name__ == "__main__":
    main()
