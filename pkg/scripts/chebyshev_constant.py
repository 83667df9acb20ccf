"""Compute the Chebyshev pairing constant three ways and print them side by side.

    python scripts/chebyshev_constant.py --samples 20000
"""
import argparse
import math
import time

from azpair import RunConfig, parse_poly, pairing_via_theorem1
from azpair.quadrature import I_integral, chebyshev_integral, dirichlet_L_chi3


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--depth", type=int, default=30)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    t = time.perf_counter()
    quad = chebyshev_integral(1e-10)
    L = dirichlet_L_chi3(1e-13)
    closed = 3 * math.sqrt(3) / (4 * math.pi) * L
    print(f"quadrature          {quad:.12f}")
    print(f"3 sqrt3 / 4pi * L   {closed:.12f}   (L(2, chi_3) = {L:.12f})")
    print(f"I(1, 1)             {I_integral(1, 1):.12f}")

    cfg = RunConfig(samples=args.samples, depth=args.depth, seed=args.seed)
    r = pairing_via_theorem1(parse_poly("x^2 - 2"), cfg)
    print(f"Monte Carlo         {r.value:.6f} +- {r.error_radius:.6f}   ({args.samples} chains, depth {args.depth})")
    print(f"elapsed {time.perf_counter() - t:.2f}s")


if __name__ == "__main__":
    main()
