"""The pairing <x^2, phi> over Q, assembled place by place.

Estimator A is

    <x^2, phi> = h_phi(0) - sum_v  integral over |z|_v < 1 of log|z|_v d mu_{phi,v}

with each local term proven zero where possible (good reduction, the
p-adic disjointness condition, a certified archimedean escape) and
estimated otherwise.  Estimator B averages Weil heights of the roots of
phi^n - beta and serves as a cross-check.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .config import RunConfig
from .heights import HeightEstimate, canonical_height, escape_radius, is_preperiodic, log_int, weil_height
from .measure import (
    ExceptionalBetaError,
    backward_sample,
    clip_unstable,
    default_beta,
    is_exceptional,
    local_integral_arch,
    _float_orbit,
)
from .newton import has_good_reduction, local_integral_series, satisfies_disjointness_condition
from .polynomial import DEGREE_CAP, PolyQ, to_primitive
from .quadrature import I_integral
from .rational import ARCHIMEDEAN, Place, RationalLike, support_primes, to_rational
from .roots import coefficients_complex, solve_shifted, _polish_composed

SCHEMA_VERSION = 1
LN2 = math.log(2)
LN3 = math.log(3)


class UnsupportedInputError(ValueError):
    """phi lies outside the monic / good-reduction scope of estimator A."""


class Method(str, Enum):
    GOOD_REDUCTION = "GoodReduction"
    LEMMA_DISJOINT = "LemmaDisjoint"
    NEWTON_POLYGON_SERIES = "NewtonPolygonSeries"
    MONTE_CARLO = "MonteCarlo"


class EqualityCase(str, Enum):
    PROVEN_EQUAL = "ProvenEqual"
    LOWER_BOUND_ONLY = "LowerBoundOnly"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class PlaceContribution:
    place: Place
    contribution: float
    method: Method
    error: float = 0.0
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "place": str(self.place),
            "contribution": self.contribution,
            "method": self.method.value,
            "error": self.error,
            **self.detail,
        }


@dataclass(frozen=True)
class PairingReport:
    value: float
    error_radius: float
    rigorous: bool
    per_place: tuple[PlaceContribution, ...]
    h_phi_zero: HeightEstimate
    equality_case: EqualityCase
    phi: PolyQ
    beta: Optional[Fraction] = None
    config: Optional[RunConfig] = None
    cross_check: Optional[list[tuple[int, float]]] = None

    def to_dict(self) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "phi": str(self.phi),
            "value": self.value,
            "error_radius": self.error_radius,
            "rigorous": self.rigorous,
            "equality_case": self.equality_case.value,
            "h_phi_zero": self.h_phi_zero.to_dict(),
            "beta": None if self.beta is None else str(self.beta),
            "per_place": [p.to_dict() for p in self.per_place],
        }
        if self.cross_check is not None:
            out["estimator_b"] = [{"n": n, "estimate": v} for n, v in self.cross_check]
        if self.config is not None:
            out["config"] = self.config.to_dict()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# -- archimedean disjointness certificates -------------------------------------


def _is_trapped(phi: PolyQ) -> bool:
    """sum |a_i| <= 1 sends the open unit disk into itself, so it lies in the Fatou set."""
    return sum(abs(c) for c in phi.coeffs) <= 1


def _disk_escapes(
    phi: PolyQ,
    R: Fraction,
    *,
    max_steps: int = 12,
    max_level: int = 8,
    max_cells: int = 100_000,
) -> bool:
    """Certify that every point of the closed unit disk escapes past R.

    The disk is covered by squares; each square's image is enclosed in a
    disk using the derivative bound sum i|a_i| (|c| + r)^(i-1), and the
    enclosure is pushed forward until it clears R.  Squares that do not
    clear are split.  Rounding is absorbed by a relative slack on every
    radius.
    """
    a = np.array([float(c) for c in phi.coeffs])
    abs_a = np.abs(a)
    d = phi.degree
    deriv_abs = abs_a[1:] * np.arange(1, d + 1)
    R_f = float(R) * (1 + 1e-9)
    slack = 8 * (d + 1) * np.finfo(float).eps

    # A centre that does not escape after many steps sinks the certificate.
    def hopeless(centres: np.ndarray) -> bool:
        z = centres.copy()
        with np.errstate(all="ignore"):
            for _ in range(60):
                z = np.polyval(a[::-1], z)
        return bool(np.any(np.isfinite(z) & (np.abs(z) <= R_f)))

    n = 16
    half = 1.0 / n
    grid = -1 + half * (2 * np.arange(n) + 1)
    cx, cy = np.meshgrid(grid, grid)
    centres = (cx + 1j * cy).ravel()
    for level in range(max_level + 1):
        r0 = half * math.sqrt(2)
        centres = centres[np.abs(centres) - r0 <= 1]
        if centres.size == 0:
            return True
        if hopeless(centres):
            return False
        z = centres.copy()
        rho = np.full(z.size, r0)
        done = np.zeros(z.size, dtype=bool)
        with np.errstate(all="ignore"):
            for _ in range(max_steps):
                mod = np.abs(z)
                lip = np.polyval(deriv_abs[::-1], mod + rho)
                size = np.polyval(abs_a[::-1], mod)
                z = np.polyval(a[::-1], z)
                rho = rho * lip * (1 + slack) + slack * size
                cleared = np.abs(z) - rho > R_f
                done |= cleared & np.isfinite(rho)
                if done.all():
                    return True
        failed = centres[~done]
        if level == max_level or 4 * failed.size > max_cells:
            return False
        half /= 2
        offsets = np.array([-1 - 1j, -1 + 1j, 1 - 1j, 1 + 1j]) * half
        centres = (failed[:, None] + offsets[None, :]).ravel()
    return False


def archimedean_certificate(phi: PolyQ) -> Optional[str]:
    """"trapped", "escape", or None when neither proof of disjointness goes through."""
    if phi.degree < 2:
        raise ValueError("degree must be >= 2")
    if _is_trapped(phi):
        return "trapped"
    if _disk_escapes(phi, escape_radius(phi)):
        return "escape"
    return None


# -- estimator A --------------------------------------------------------------


def _check_scope(phi: PolyQ) -> None:
    if phi.degree < 2:
        raise ValueError("the pairing needs deg(phi) >= 2")
    if phi.is_monic:
        return
    bad = [p for p in support_primes(phi.coeffs) if not has_good_reduction(phi, p)]
    if bad:
        raise UnsupportedInputError(
            f"non-monic phi with bad reduction at {bad}; only monic inputs or "
            "non-monic inputs with good reduction everywhere are supported"
        )


def orbit_avoids(phi: PolyQ, beta: RationalLike, steps: int = 50) -> bool:
    """beta keeps archimedean distance >= 1/2 from phi^k(0), k <= steps."""
    b = float(to_rational(beta))
    return all(abs(b - y) >= 0.5 for y in _float_orbit(phi, 0.0, steps))


def choose_beta(phi: PolyQ, config: RunConfig) -> Fraction:
    if config.beta is None:
        return Fraction(default_beta(phi))
    beta = to_rational(config.beta)
    if is_exceptional(phi, beta):
        raise ExceptionalBetaError("beta appears exceptional")
    return beta


def _finite_place(phi: PolyQ, p: int, beta: Fraction, config: RunConfig) -> PlaceContribution:
    place = Place.finite(p)
    if has_good_reduction(phi, p):
        return PlaceContribution(place, 0.0, Method.GOOD_REDUCTION)
    if phi.is_monic and satisfies_disjointness_condition(phi, p):
        return PlaceContribution(place, 0.0, Method.LEMMA_DISJOINT)
    series = local_integral_series(phi, beta, p, config.n_max)
    err = series.spread if math.isfinite(series.spread) else abs(series.last)
    return PlaceContribution(
        place,
        series.last,
        Method.NEWTON_POLYGON_SERIES,
        err,
        {"approximants": list(series.values), "cauchy": series.cauchy, "beta": str(beta)},
    )


def _archimedean_place(phi: PolyQ, beta: Fraction, config: RunConfig) -> tuple[PlaceContribution, bool]:
    """Returns the contribution and whether it was certified."""
    cert = archimedean_certificate(phi)
    if cert is not None:
        return PlaceContribution(ARCHIMEDEAN, 0.0, Method.LEMMA_DISJOINT, 0.0, {"certificate": cert}), True
    sample = backward_sample(phi, complex(beta), config.depth, config.samples, config.seed)
    est = local_integral_arch(sample, config.clip_eps)
    detail = {
        **{k: v for k, v in est.to_dict().items() if k != "value"},
        "samples": sample.count,
        "depth": sample.depth,
        "inside_fraction": float(np.mean(np.abs(sample.points) < 1)),
        "clip_unstable": clip_unstable(sample, config.clip_eps),
    }
    return PlaceContribution(ARCHIMEDEAN, est.value, Method.MONTE_CARLO, 3 * est.std_error, detail), False


def pairing_via_theorem1(phi: PolyQ, config: RunConfig | None = None) -> PairingReport:
    """Estimator A: h_phi(0) minus the local log integrals over the unit disks."""
    config = config or RunConfig()
    _check_scope(phi)
    h0 = canonical_height(phi, 0, eps=config.tol)
    beta = choose_beta(phi, config)
    arch, certified = _archimedean_place(phi, beta, config)
    per_place = [arch] + [_finite_place(phi, p, beta, config) for p in support_primes(phi.coeffs)]
    value = h0.value - math.fsum(c.contribution for c in per_place)
    error = h0.error_radius + math.fsum(c.error for c in per_place)
    rigorous = h0.rigorous and not any(
        c.method is Method.MONTE_CARLO
        or (c.method is Method.NEWTON_POLYGON_SERIES and not c.detail["cauchy"])
        for c in per_place
    )
    finite_zero = all(c.method in (Method.GOOD_REDUCTION, Method.LEMMA_DISJOINT) for c in per_place[1:])
    if finite_zero and certified:
        case = EqualityCase.PROVEN_EQUAL
    elif finite_zero and arch.detail.get("inside_fraction", 1.0) == 0.0:
        # No sampled mass inside the disk, but no proof either.
        case = EqualityCase.UNKNOWN
    else:
        case = EqualityCase.LOWER_BOUND_ONLY
    return PairingReport(value + 0.0, error, rigorous, tuple(per_place), h0, case, phi, beta, config)


def equality_certificate(phi: PolyQ) -> EqualityCase:
    """ProvenEqual when every local integral is proven zero, else LowerBoundOnly."""
    if not phi.is_monic:
        raise ValueError("equality_certificate expects a monic polynomial")
    for p in support_primes(phi.coeffs):
        if not (has_good_reduction(phi, p) or satisfies_disjointness_condition(phi, p)):
            return EqualityCase.LOWER_BOUND_ONLY
    if archimedean_certificate(phi) is None:
        return EqualityCase.LOWER_BOUND_ONLY
    return EqualityCase.PROVEN_EQUAL


# -- estimator B --------------------------------------------------------------


def pairing_via_preimages(
    phi: PolyQ,
    beta: RationalLike,
    n_max: int,
    *,
    stall_tol: float = 1e-3,
    degree_cap: int = DEGREE_CAP,
    seed: int = 0,
) -> list[tuple[int, float]]:
    """(n, (1/d^n) * sum of h(alpha) over phi^n(alpha) = beta) for n = 1..n_max.

    The sum is log|lead F_n| + sum log+|alpha| for the primitive integer form
    F_n of phi^n - beta.  The exact iterate supplies the leading coefficient
    and content; the roots come from a preimage tree polished against the
    composed map.
    """
    if phi.degree < 2:
        raise ValueError("degree must be >= 2")
    beta = to_rational(beta)
    if is_exceptional(phi, beta):
        raise ExceptionalBetaError("beta appears exceptional")
    if not orbit_avoids(phi, beta):
        raise ValueError("beta lies within 1/2 of the forward orbit of 0")
    d = phi.degree
    phi_c = coefficients_complex(phi)
    rng = np.random.default_rng(seed)
    level = np.array([complex(beta)])
    power = PolyQ.x()
    out = []
    for n in range(1, n_max + 1):
        if d**n > degree_cap:
            warnings.warn(f"degree cap {degree_cap} stops estimator B at n = {n - 1}", RuntimeWarning, stacklevel=2)
            break
        power = phi.compose(power)
        level = solve_shifted(phi_c, level, rng).reshape(-1)
        roots = _polish_composed(phi_c, level, complex(beta), n)
        F = to_primitive(power - beta)
        mags = np.abs(roots)
        total = log_int(F.leading) + math.fsum(np.log(mags[mags > 1]))
        out.append((n, total / d**n))
    if len(out) >= 2 and abs(out[-1][1] - out[-2][1]) > stall_tol:
        warnings.warn(
            f"estimator B still moving at n = {out[-1][0]}: "
            f"|delta| = {abs(out[-1][1] - out[-2][1]):.2e} > {stall_tol:g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return out


# -- closed forms and corollaries -----------------------------------------------


def conjugated_squaring_pairing(a: RationalLike, b: RationalLike, tol: float = 1e-10) -> float:
    """<x^2, f^-1(f(x)^2)> for f = ax + b: h(b) + log|a| + I(|a|, |b|)."""
    a, b = to_rational(a), to_rational(b)
    if a == 0:
        raise ValueError("a must be nonzero")
    return weil_height(b) + math.log(abs(float(a))) + I_integral(abs(float(a)), abs(float(b)), tol)


def conjugated_squaring_map(a: RationalLike, b: RationalLike) -> PolyQ:
    """f^-1(f(x)^2) for f = ax + b, i.e. ((ax + b)^2 - b) / a."""
    a, b = to_rational(a), to_rational(b)
    if a == 0:
        raise ValueError("a must be nonzero")
    f = PolyQ([b, a])
    return (f * f - b) * (1 / a)


@dataclass(frozen=True)
class QuadBounds:
    lower: float
    upper: float
    exact: Optional[float]


def _at_least_two_plus_root2(c: Fraction) -> bool:
    m = abs(c)
    return m >= 2 and (m - 2) ** 2 >= 2


def quad_family_bounds(c: RationalLike, eps: float = 1e-9) -> QuadBounds:
    """Bracket (1/2) h(c) - log 3 <= <x^2, x^2 + c> <= (1/2) h(c) + log 2.

    ``exact`` is h_phi(0) when |c| >= 2 + sqrt 2 (or c = 0); every prime
    already satisfies good reduction or the disjointness condition for this family.
    """
    c = to_rational(c)
    hc = weil_height(c)
    exact = None
    if c == 0:
        exact = 0.0
    elif _at_least_two_plus_root2(c):
        exact = canonical_height(PolyQ([c, 0, 1]), 0, eps).value
    return QuadBounds(0.5 * hc - LN3, 0.5 * hc + LN2, exact)


def height_difference_bound(phi: PolyQ, pairing: PairingReport) -> float:
    """h_phi(z) - h(z) <= <x^2, phi> + h_phi(inf) + log 2, with h_phi(inf) = 0 for polynomials."""
    if pairing.phi != phi:
        raise ValueError("pairing report belongs to a different polynomial")
    return pairing.value + 0.0 + LN2


@dataclass(frozen=True)
class RigidityReport:
    zero_preperiodic: Optional[bool]
    disk_disjoint: bool
    hypotheses_hold: Optional[bool]
    conclusion_is_power_map: bool

    @property
    def contradiction(self) -> bool:
        return self.hypotheses_hold is True and not self.conclusion_is_power_map

    def to_dict(self) -> dict:
        return {
            "zero_preperiodic": self.zero_preperiodic,
            "disk_disjoint": self.disk_disjoint,
            "hypotheses_hold": self.hypotheses_hold,
            "conclusion_is_power_map": self.conclusion_is_power_map,
            "contradiction": self.contradiction,
        }


def rigidity_check(phi: PolyQ, max_steps: int = 10_000) -> RigidityReport:
    """Does phi satisfy "0 preperiodic and Julia set off the open disk", and is it x^d?

    Monic integer polynomials have good reduction at every prime, so only
    the archimedean disjointness needs a certificate.
    """
    if not phi.is_monic or any(c.denominator != 1 for c in phi.coeffs):
        raise ValueError("rigidity_check expects a monic polynomial with integer coefficients")
    pre = is_preperiodic(phi, 0, max_steps)
    disjoint = archimedean_certificate(phi) is not None
    if pre is False or not disjoint:
        hyp: Optional[bool] = False
    else:
        hyp = pre
    power_map = all(c == 0 for c in phi.coeffs[:-1])
    return RigidityReport(pre, disjoint, hyp, power_map)
