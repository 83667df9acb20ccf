"""azpair command-line interface.

Every subcommand prints one report on stdout; the full run configuration is
embedded so a run can be repeated exactly.  Exit codes: 0 ok, 2 usage or
parse error, 3 computation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .config import FORMATS, RunConfig
from .heights import as_point, canonical_height
from .measure import backward_sample
from .newton import has_good_reduction, newton_polygon, root_valuations, satisfies_disjointness_condition
from .pairing import (
    SCHEMA_VERSION,
    archimedean_certificate,
    choose_beta,
    pairing_via_preimages,
    pairing_via_theorem1,
    UnsupportedInputError,
)
from .polynomial import PolynomialParseError, parse_poly
from .quadrature import I_integral, chebyshev_closed_form, chebyshev_integral, dirichlet_L_chi3
from .rational import is_prime, support_primes, to_rational

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 2, 3


class UsageError(Exception):
    pass


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = RunConfig()
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--samples", type=int, default=d.samples, help="Monte-Carlo chains")
    p.add_argument("--depth", type=int, default=d.depth, help="backward steps per chain")
    p.add_argument("--n-max", type=int, default=d.n_max, help="deepest iterate for series and estimator B")
    p.add_argument("--clip-eps", type=float, default=d.clip_eps)
    p.add_argument("--tol", type=float, default=d.tol)
    p.add_argument("--format", choices=FORMATS, default=d.output_format)
    p.add_argument("--beta", default=None, help="base point as an integer or a/b")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="azpair", description="Arakelov-Zhang pairing <x^2, phi> over Q")
    parser.add_argument("--version", action="version", version=f"azpair {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pairing", parents=[common], help="pairing <x^2, phi>")
    p.add_argument("poly")
    p.add_argument("--cross-check", action="store_true", help="also run the preimage-average estimator")

    p = sub.add_parser("height", parents=[common], help="canonical height h_phi(x)")
    p.add_argument("poly")
    p.add_argument("point", help="rational a/b or inf")

    p = sub.add_parser("newton", parents=[common], help="p-adic Newton polygon")
    p.add_argument("poly")
    p.add_argument("prime", type=int)

    p = sub.add_parser("reduction", parents=[common], help="per-place method tags")
    p.add_argument("poly")

    sub.add_parser("constants", parents=[common], help="Chebyshev constant and L(2, chi_3)")

    p = sub.add_parser("I", parents=[common], help="the integral I(a, b)")
    p.add_argument("a", type=float)
    p.add_argument("b", type=float)

    p = sub.add_parser("sample", parents=[common], help="backward-iteration sample of the canonical measure")
    p.add_argument("poly")
    return parser


def _config(args) -> RunConfig:
    try:
        if args.beta is not None:
            to_rational(args.beta)
        return RunConfig(
            seed=args.seed,
            samples=args.samples,
            depth=args.depth,
            n_max=args.n_max,
            clip_eps=args.clip_eps,
            tol=args.tol,
            output_format=args.format,
            beta=args.beta,
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc


def _poly(text: str, min_degree: int = 0):
    try:
        phi = parse_poly(text)
    except (PolynomialParseError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse polynomial: {exc}") from exc
    if phi.degree < min_degree:
        raise UsageError(f"polynomial must have degree >= {min_degree}")
    return phi


def _emit(payload: dict, cfg: RunConfig, rows: list[dict] | None = None) -> str:
    """Render a report; ``rows`` is the tabular view used for csv output."""
    payload = {"schema": SCHEMA_VERSION, **payload, "config": cfg.to_dict()}
    if cfg.output_format == "json":
        return json.dumps(payload, indent=2)
    if cfg.output_format == "csv":
        rows = rows if rows is not None else [{k: v for k, v in payload.items() if not isinstance(v, (dict, list))}]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue().rstrip("\n")
    lines = []
    for k, v in payload.items():
        if k == "config":
            continue
        lines.append(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    return "\n".join(lines)


def cmd_pairing(args, cfg: RunConfig) -> str:
    phi = _poly(args.poly, 2)
    report = pairing_via_theorem1(phi, cfg)
    payload = report.to_dict()
    payload.pop("schema")
    payload.pop("config")
    if args.cross_check:
        series = pairing_via_preimages(phi, report.beta, cfg.n_max, seed=cfg.seed)
        payload["estimator_b"] = [{"n": n, "estimate": v} for n, v in series]
        payload["estimator_gap"] = abs(series[-1][1] - report.value)
    rows = [
        {"place": c["place"], "method": c["method"], "contribution": c["contribution"], "error": c["error"]}
        for c in payload["per_place"]
    ]
    return _emit(payload, cfg, rows)


def cmd_height(args, cfg: RunConfig) -> str:
    phi = _poly(args.poly, 2)
    try:
        point = as_point(args.point)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse point: {exc}") from exc
    est = canonical_height(phi, point, eps=cfg.tol)
    return _emit({"phi": str(phi), "point": str(point), **est.to_dict()}, cfg)


def cmd_newton(args, cfg: RunConfig) -> str:
    phi = _poly(args.poly, 1)
    if not is_prime(args.prime):
        raise UsageError(f"{args.prime} is not a prime")
    poly = newton_polygon(phi, args.prime)
    vals = root_valuations(phi, args.prime)
    payload = {"phi": str(phi), **poly.to_dict(), "root_valuations": vals.to_dict()}
    rows = [{"slope": s["slope"], "length": s["length"]} for s in payload["slopes"]] or [{"slope": "", "length": 0}]
    return _emit(payload, cfg, rows)


def cmd_reduction(args, cfg: RunConfig) -> str:
    phi = _poly(args.poly, 2)
    places = []
    cert = archimedean_certificate(phi)
    places.append({"place": "inf", "method": "LemmaDisjoint" if cert else "MonteCarlo", "certificate": cert})
    for p in support_primes(phi.coeffs):
        if has_good_reduction(phi, p):
            tag = "GoodReduction"
        elif phi.is_monic and satisfies_disjointness_condition(phi, p):
            tag = "LemmaDisjoint"
        else:
            tag = "NewtonPolygonSeries"
        places.append({"place": str(p), "method": tag, "certificate": None})
    return _emit({"phi": str(phi), "places": places}, cfg, places)


def cmd_constants(args, cfg: RunConfig) -> str:
    cheb = chebyshev_integral(cfg.tol)
    L = dirichlet_L_chi3(min(cfg.tol, 1e-12))
    payload = {
        "chebyshev_integral": cheb,
        "L2_chi3": L,
        "chebyshev_from_L": chebyshev_closed_form(min(cfg.tol, 1e-12)),
        "chebyshev_plus_log2": cheb + math.log(2),
    }
    return _emit(payload, cfg)


def cmd_I(args, cfg: RunConfig) -> str:
    if not args.a > 0 or not args.b >= 0:
        raise UsageError("I(a, b) needs a > 0 and b >= 0")
    return _emit({"a": args.a, "b": args.b, "I": I_integral(args.a, args.b, min(cfg.tol, 1e-10))}, cfg)


def cmd_sample(args, cfg: RunConfig) -> str:
    phi = _poly(args.poly, 2)
    beta = choose_beta(phi, cfg)
    sample = backward_sample(phi, complex(beta), cfg.depth, cfg.samples, cfg.seed)
    if cfg.output_format == "csv":
        buf = io.StringIO()
        sample.to_csv(buf)
        return buf.getvalue().rstrip("\n")
    points = [[float(z.real), float(z.imag)] for z in sample.points]
    return _emit({"phi": str(phi), "beta": str(beta), "points": points}, cfg)


COMMANDS = {
    "pairing": cmd_pairing,
    "height": cmd_height,
    "newton": cmd_newton,
    "reduction": cmd_reduction,
    "constants": cmd_constants,
    "I": cmd_I,
    "sample": cmd_sample,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = _config(args)
        out = COMMANDS[args.command](args, cfg)
    except (UsageError, UnsupportedInputError) as exc:
        print(f"azpair: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # anything raised by the numerics
        print(f"azpair: computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
