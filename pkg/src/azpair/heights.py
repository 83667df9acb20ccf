"""Weil heights, Mahler measures and Call-Silverman canonical heights."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import gmpy2
import numpy as np

from .polynomial import PolyQ, PrimitiveIntPoly, to_primitive
from .rational import ARCHIMEDEAN, Place, RationalLike, support_primes, to_rational, valuation
from .roots import RootCluster, complex_roots

BIT_BUDGET = 2**20
LN2 = math.log(2)


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^1(Q); ``value is None`` is the point at infinity."""

    value: Fraction | None

    @classmethod
    def finite(cls, q: RationalLike) -> "ProjPoint":
        return cls(to_rational(q))

    @classmethod
    def infinity(cls) -> "ProjPoint":
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)


INFINITY = ProjPoint.infinity()

PointLike = Union[ProjPoint, RationalLike]


def as_point(x: PointLike) -> ProjPoint:
    if isinstance(x, ProjPoint):
        return x
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "oo"):
        return INFINITY
    return ProjPoint.finite(x)


@dataclass(frozen=True)
class HeightEstimate:
    value: float
    error_radius: float
    rigorous: bool

    def __post_init__(self):
        if not self.error_radius >= 0:
            raise ValueError("error radius must be nonnegative")

    def to_dict(self) -> dict:
        return {"value": self.value, "error_radius": self.error_radius, "rigorous": self.rigorous}


def log_int(n: int) -> float:
    """Natural log of a (possibly enormous) positive integer."""
    n = int(n)
    bits = n.bit_length()
    if bits < 1000:
        return math.log(n)
    shift = bits - 64
    return math.log(n >> shift) + shift * LN2


def weil_height(x: PointLike) -> float:
    """log max(|a|, |b|) for x = a/b in lowest terms; h(inf) = 0."""
    x = as_point(x)
    if x.is_infinity:
        return 0.0
    q = x.value
    return log_int(max(abs(q.numerator), q.denominator))


def _log_plus(t: float) -> float:
    return max(0.0, math.log(t)) if t > 0 else 0.0


# -- Mahler measure -----------------------------------------------------------


def mahler_estimate(
    F: PrimitiveIntPoly,
    roots: Sequence[RootCluster] | np.ndarray | None = None,
    tol: float = 1e-12,
) -> HeightEstimate:
    """log M(F) = log|lead| + sum of log+|root|, with the error implied by root radii.

    ``roots`` may be clusters or a flat array of roots listed with
    multiplicity (the latter carries no radius information, so the
    estimate is then flagged non-rigorous).
    """
    if F.degree < 1:
        raise ValueError("Mahler measure needs degree >= 1")
    lead = log_int(abs(F.leading))
    if roots is None:
        roots = complex_roots(F.to_polyq(), tol)
    if isinstance(roots, np.ndarray):
        if roots.size != F.degree:
            raise ValueError("root array does not match the degree")
        mags = np.abs(roots)
        total = float(math.fsum(np.log(mags[mags > 1])))
        return HeightEstimate(lead + total, 0.0, False)
    total = 0.0
    err = 0.0
    for c in roots:
        r = abs(c.center)
        total += c.multiplicity * _log_plus(r)
        if r + c.residual_radius > 1:
            lo = max(r - c.residual_radius, 1e-300)
            err += c.multiplicity * (_log_plus(r + c.residual_radius) - _log_plus(lo))
    return HeightEstimate(lead + total, err, True)


def log_mahler_measure(F: PrimitiveIntPoly, tol: float = 1e-12) -> float:
    return mahler_estimate(F, tol=tol).value


def sum_root_heights(f: PolyQ, roots=None, tol: float = 1e-12) -> float:
    """Sum of h(alpha) over the roots of f, with multiplicity.

    Uses sum h(alpha) = log M(F) for the primitive integer form F of f
    (Gauss's lemma splits F into primitive irreducible factors, and for each
    of those the conjugates' heights add up to its log Mahler measure).
    """
    if f.degree < 1:
        raise ValueError("constant polynomial has no roots")
    return mahler_estimate(to_primitive(f), roots=roots, tol=tol).value


# -- canonical heights ------------------------------------------------------


def _coefficient_places(phi: PolyQ) -> list[Place]:
    return [ARCHIMEDEAN] + [Place.finite(p) for p in support_primes(phi.coeffs)]


def _log_abs_or_none(q: Fraction, place: Place) -> float | None:
    if q == 0:
        return None
    if place.is_archimedean:
        return math.log(abs(q.numerator)) - math.log(q.denominator)
    return -valuation(q, place.prime) * math.log(place.prime)


def _archimedean_lower_deficit(phi: PolyQ) -> float:
    """min over R >= 1 of max(d log R, -log kappa(R)), kappa(R) = |a_d| - sum_{i<d} |a_i| R^(i-d).

    For |y| > R, |phi(y)| >= kappa(R) |y|^d; for |y| <= R the deficit is at
    most d log R.  Any admissible R gives a valid bound, so the search only
    needs to be good, not exact; kappa is evaluated exactly at the chosen R.
    """
    d = phi.degree
    lead = abs(phi.leading)
    lower = [abs(c) for c in phi.coeffs[:-1]]

    def kappa(r: Fraction) -> Fraction:
        return lead - sum(c * r ** (i - d) for i, c in enumerate(lower))

    def gap(r: float) -> float:
        k = kappa(Fraction(r))
        if k <= 0:
            return -math.inf
        return -math.log(k) - d * math.log(r)

    lo, hi = 1.0, 2.0
    while gap(hi) > 0 or gap(hi) == -math.inf:
        hi *= 2
    if gap(lo) <= 0 and gap(lo) != -math.inf:
        hi = lo
    else:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            g = gap(mid)
            if g > 0 or g == -math.inf:
                lo = mid
            else:
                hi = mid
    r = Fraction(hi)
    return max(d * math.log(r), -math.log(kappa(r)), 0.0)


def telescoping_constant(phi: PolyQ) -> float:
    """A constant C with |h(phi(y)) - d h(y)| <= C for every rational y.

    Both sides are bounded place by place.  Upper: |phi(y)|_v is at most
    sum |a_i| max(1, |y|)^d at infinity and max |a_i|_v max(1, |y|_v)^d at
    a prime.  Lower: past a radius R_v the leading term dominates, so the
    local loss is at most max(d log R_v, -log of the leading term's margin).
    Places outside the coefficient support contribute nothing.
    """
    d = phi.degree
    if d < 2:
        raise ValueError("canonical heights need degree >= 2")
    upper = 0.0
    lower = 0.0
    for place in _coefficient_places(phi):
        if place.is_archimedean:
            upper += max(0.0, math.log(float(sum(abs(c) for c in phi.coeffs))))
            lower += _archimedean_lower_deficit(phi)
            continue
        logs = [_log_abs_or_none(c, place) for c in phi.coeffs]
        upper += max(0.0, max(v for v in logs if v is not None))
        log_lead = logs[-1]
        log_r = 0.0
        for i, v in enumerate(logs[:-1]):
            if v is not None:
                log_r = max(log_r, (v - log_lead) / (d - i))
        lower += max(d * log_r, -log_lead, 0.0)
    # Absorb float rounding in the logs above.
    return max(upper, lower) * (1 + 1e-12) + 1e-12


def _mpq_height(y) -> float:
    return log_int(max(abs(y.numerator), y.denominator))


def _mpq_bits(y) -> int:
    return max(int(y.numerator).bit_length() if y.numerator else 0, int(y.denominator).bit_length())


def _orbit_map(phi: PolyQ):
    cs = [gmpy2.mpq(c.numerator, c.denominator) for c in phi.coeffs]

    def step(y):
        acc = cs[-1]
        for c in reversed(cs[:-1]):
            acc = acc * y + c
        return acc

    return step


def escape_radius(phi: PolyQ) -> Fraction:
    """A rational R such that |z| > R forces |phi(z)| > |z| and |phi^n(z)| -> infinity.

    With g(t) = |a_d| t^d - sum_{i<d} |a_i| t^i - t we have
    |phi(z)| - |z| >= g(|z|), and g has exactly one positive root (one sign
    change), so any R with g(R) > 0 lies past it.  The check g(R) > 0 is exact.
    """
    abs_c = [abs(c) for c in phi.coeffs]
    d = phi.degree

    def g(t):
        return abs_c[d] * t**d - sum(abs_c[i] * t**i for i in range(d)) - t

    hi = 1.0
    while float(g(Fraction(hi))) <= 0:
        hi *= 2
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if float(g(Fraction(mid))) > 0:
            hi = mid
        else:
            lo = mid
    R = Fraction(hi) * Fraction(1_000_000_001, 1_000_000_000)
    while g(R) <= 0:
        R *= Fraction(11, 10)
    return R


class _EscapeTail:
    """Sharper tail bound once an orbit has escaped at every place that matters.

    Suppose |y| > max(R, 1) at infinity and, at each prime of bad reduction,
    |a_d y^d|_p beats every other term and |phi(y)|_p > |y|_p > 1.  Then
    along the rest of the orbit log+|phi(y)|_v - d log+|y|_v equals
    log|a_d|_v exactly at those primes, 0 at good primes, and
    log|a_d| + log|1 + e| with |e| <= delta at infinity, where
    delta = sum_{i<d} |a_i / a_d| |y|^(i-d) only shrinks.  The log|a_d|_v
    cancel by the product formula, so every later step moves the height by
    at most eta = -log(1 - delta).
    """

    def __init__(self, phi: PolyQ):
        self.d = phi.degree
        self.log_r = math.log(max(float(escape_radius(phi)), 1.0)) + 1e-12
        lead = abs(phi.leading)
        self.ratios = [(i, float(abs(c) / lead)) for i, c in enumerate(phi.coeffs[:-1]) if c != 0]
        self.bad = []
        for p in support_primes(phi.coeffs):
            vals = [None if c == 0 else valuation(c, p) for c in phi.coeffs]
            good = vals[-1] == 0 and all(v is None or v >= 0 for v in vals[:-1])
            if not good:
                self.bad.append((p, vals))

    def _escaped_at(self, p: int, vals, y) -> bool:
        v_y = valuation(Fraction(int(y.numerator), int(y.denominator)), p)
        d, v_lead = self.d, vals[-1]
        if v_y >= 0 or v_lead + (d - 1) * v_y >= 0:
            return False
        return all(v is None or (d - i) * v_y < v - v_lead for i, v in enumerate(vals[:-1]))

    def eta(self, y) -> float | None:
        if y == 0:
            return None
        log_y = log_int(abs(int(y.numerator))) - log_int(int(y.denominator))
        if log_y <= self.log_r:
            return None
        delta = math.fsum(r * math.exp((i - self.d) * log_y) for i, r in self.ratios)
        if delta >= 0.5:
            return None
        if not all(self._escaped_at(p, vals, y) for p, vals in self.bad):
            return None
        # log1p error and the float logs above are far below this slack.
        return -math.log1p(-delta) * (1 + 1e-9) + 1e-300


def canonical_height(
    phi: PolyQ,
    x: PointLike,
    eps: float = 1e-9,
    *,
    bit_budget: int = BIT_BUDGET,
) -> HeightEstimate:
    """h_phi(x) as h(phi^n(x)) / d^n with a rigorous tail bound.

    The default bound is C / (d^n (d-1)) with C from telescoping_constant;
    once the orbit has escaped everywhere it matters the much smaller
    eta / (d^n (d-1)) from _EscapeTail takes over.  The orbit is exact.
    Preperiodic orbits are detected and return 0 with zero error.  If the
    orbit outgrows ``bit_budget`` bits the estimate stops early and carries
    its larger (still rigorous) error, with a warning.
    """
    d = phi.degree
    if d < 2:
        raise ValueError("canonical heights need degree >= 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = as_point(x)
    if x.is_infinity:
        # Infinity is fixed by every polynomial and h(inf) = 0.
        return HeightEstimate(0.0, 0.0, True)
    C = telescoping_constant(phi)
    tail = _EscapeTail(phi)
    wander_bound = C / (d - 1)
    step = _orbit_map(phi)
    y = gmpy2.mpq(x.value.numerator, x.value.denominator)
    seen = {y}
    n = 0

    def bound(n: int, y) -> float:
        best = C
        # The escape test costs a few logs; skip it while the C bound is fine.
        if C / (d**n * (d - 1)) > eps:
            eta = tail.eta(y)
            if eta is not None:
                best = min(best, eta)
        return best / (d**n * (d - 1))

    err = bound(0, y)
    while err > eps:
        nxt = step(y)
        if _mpq_bits(nxt) > bit_budget:
            warnings.warn(
                f"orbit exceeded {bit_budget} bits after {n} steps; "
                f"error radius {err:.3g} exceeds eps={eps:g}",
                RuntimeWarning,
                stacklevel=2,
            )
            break
        y = nxt
        n += 1
        if _mpq_height(y) <= wander_bound:
            if y in seen:
                return HeightEstimate(0.0, 0.0, True)
            seen.add(y)
        err = bound(n, y)
    value = _mpq_height(y) / d**n
    return HeightEstimate(value, err, True)


def is_preperiodic(phi: PolyQ, x: PointLike, max_steps: int = 10_000) -> bool | None:
    """Exact preperiodicity test; None when the step budget runs out.

    Once h(y) > C/(d-1) the heights along the orbit increase strictly, so
    the orbit cannot return; below that bound there are finitely many
    rationals and an exact repeat settles it.
    """
    x = as_point(x)
    if x.is_infinity:
        return True
    d = phi.degree
    bound = telescoping_constant(phi) / (d - 1)
    step = _orbit_map(phi)
    y = gmpy2.mpq(x.value.numerator, x.value.denominator)
    seen = set()
    for _ in range(max_steps):
        if _mpq_height(y) > bound * (1 + 1e-9) + 1e-9:
            return False
        if y in seen:
            return True
        seen.add(y)
        y = step(y)
    return None
