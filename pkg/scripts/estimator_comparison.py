"""Estimator A (local integrals) against estimator B (preimage heights) on a list of maps.

    python scripts/estimator_comparison.py "x^2 - 2" "x^2 + 5" "x^3 - x"
"""
import argparse
import warnings

from azpair import RunConfig, pairing_via_preimages, pairing_via_theorem1, parse_poly

DEFAULT_MAPS = ["x^2", "x^2 - 1", "x^2 - 2", "x^2 + 2x", "x^2 + 1/2", "x^2 + 4", "x^2 + 5", "x^2 - 7", "x^3 - x"]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("maps", nargs="*", default=DEFAULT_MAPS)
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--n-max", type=int, default=10)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    cfg = RunConfig(samples=args.samples, seed=args.seed, n_max=args.n_max)
    print(f"{'phi':<14}{'A':>10}{'+-':>10}{'B':>10}{'|A-B|':>10}  case")
    for text in args.maps:
        phi = parse_poly(text)
        a = pairing_via_theorem1(phi, cfg)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            b = pairing_via_preimages(phi, a.beta, args.n_max if phi.degree == 2 else 7, seed=args.seed)
        note = " (B still moving)" if any("still moving" in str(w.message) for w in caught) else ""
        last = b[-1][1]
        print(f"{text:<14}{a.value:>10.5f}{a.error_radius:>10.5f}{last:>10.5f}{abs(a.value - last):>10.5f}"
              f"  {a.equality_case.value}{note}")


if __name__ == "__main__":
    main()
