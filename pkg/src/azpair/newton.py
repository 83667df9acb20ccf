"""p-adic Newton polygons and the non-archimedean local integrals.

Everything here is exact; floats appear only when a valuation sum is
finally multiplied by log p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .polynomial import DEGREE_CAP, PolyQ, iterate
from .rational import RationalLike, to_rational, valuation


class SingularIntegrandError(ValueError):
    pass


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of the points (i, v_p(a_i)) with a_i != 0."""

    prime: int
    vertices: tuple[tuple[int, Fraction], ...]

    @property
    def segments(self) -> list[tuple[Fraction, int]]:
        """(slope, horizontal length) left to right."""
        out = []
        for (i0, v0), (i1, v1) in zip(self.vertices, self.vertices[1:]):
            out.append((Fraction(v1 - v0, i1 - i0), i1 - i0))
        return out

    def to_dict(self) -> dict:
        return {
            "prime": self.prime,
            "vertices": [[i, str(v)] for i, v in self.vertices],
            "slopes": [{"slope": str(s), "length": n} for s, n in self.segments],
        }


@dataclass(frozen=True)
class ValuationMultiset:
    """Valuations of the nonzero roots with multiplicities, plus the number of roots at 0."""

    entries: tuple[tuple[Fraction, int], ...]
    zero_roots: int = 0

    @property
    def total(self) -> int:
        return sum(m for _, m in self.entries)

    def to_dict(self) -> dict:
        return {
            "entries": [{"valuation": str(v), "multiplicity": m} for v, m in self.entries],
            "zero_roots": self.zero_roots,
        }


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(f: PolyQ, p: int) -> NewtonPolygon:
    if f.is_zero:
        raise ValueError("Newton polygon of the zero polynomial is undefined")
    points = [(i, Fraction(valuation(c, p))) for i, c in enumerate(f.coeffs) if c != 0]
    hull: list[tuple[int, Fraction]] = []
    for pt in points:
        # Drop the last vertex while it lies on or above the new chord.
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return NewtonPolygon(p, tuple(hull))


def root_valuations(f: PolyQ, p: int) -> ValuationMultiset:
    """Each segment of slope s and length l gives l roots of valuation -s."""
    poly = newton_polygon(f, p)
    zero_roots = poly.vertices[0][0]
    entries = sorted(((-s, n) for s, n in poly.segments), key=lambda e: e[0])
    return ValuationMultiset(tuple(entries), zero_roots)


def has_good_reduction(phi: PolyQ, p: int) -> bool:
    """v_p(a_d) = 0 and every other coefficient p-integral."""
    if valuation(phi.leading, p) != 0:
        return False
    return all(c == 0 or valuation(c, p) >= 0 for c in phi.coeffs[:-1])


def satisfies_disjointness_condition(phi: PolyQ, p: int) -> bool:
    """v(a_0) <= 0 and v(a_0) < v(a_i) for all i >= 1, for monic phi.

    When v(a_0) = 0 this only holds together with good reduction.
    """
    if not phi.is_monic:
        raise ValueError("the disjointness condition is stated for monic polynomials")
    if phi.degree < 2:
        raise ValueError("degree must be >= 2")
    a0 = phi.coeff(0)
    if a0 == 0:
        return False
    v0 = valuation(a0, p)
    if v0 > 0:
        return False
    if v0 == 0:
        return has_good_reduction(phi, p)
    return all(c == 0 or v0 < valuation(c, p) for c in phi.coeffs[1:])


def _positive_valuation_sum(f: PolyQ, p: int) -> Fraction:
    rv = root_valuations(f, p)
    if rv.zero_roots:
        raise SingularIntegrandError(
            "integrand singular: 0 is an n-th preimage of beta; choose a different beta"
        )
    return sum((v * m for v, m in rv.entries if v > 0), Fraction(0))


def local_integral_nonarch(
    phi: PolyQ, beta: RationalLike, p: int, n: int, degree_cap: int = DEGREE_CAP
) -> float:
    """(1/d^n) * sum of log|alpha|_p over roots of phi^n - beta inside the open p-adic unit disk."""
    if phi.degree < 2:
        raise ValueError("degree must be >= 2")
    if n < 1:
        raise ValueError("n must be positive")
    f = iterate(phi, n, degree_cap) - to_rational(beta)
    total = _positive_valuation_sum(f, p)
    if total == 0:
        return 0.0
    return -float(total) * math.log(p) / phi.degree**n


@dataclass(frozen=True)
class ApproximantSeries:
    prime: int
    beta: Fraction
    values: tuple[float, ...]  # index k holds level k+1
    cauchy: bool

    @property
    def last(self) -> float:
        return self.values[-1]

    @property
    def spread(self) -> float:
        """|last - previous|, the only error proxy available without a rate."""
        return abs(self.values[-1] - self.values[-2]) if len(self.values) > 1 else math.inf

    def to_dict(self) -> dict:
        return {
            "prime": self.prime,
            "beta": str(self.beta),
            "approximants": list(self.values),
            "cauchy": self.cauchy,
        }


def local_integral_series(
    phi: PolyQ,
    beta: RationalLike,
    p: int,
    n_max: int,
    *,
    stall_tol: float = 1e-3,
    degree_cap: int = DEGREE_CAP,
) -> ApproximantSeries:
    """Level-n approximants for n = 1..n_max, iterating phi incrementally.

    ``cauchy`` is False when the last step moved by more than ``stall_tol``
    or the steps stopped shrinking.
    """
    beta = to_rational(beta)
    d = phi.degree
    values = []
    power = PolyQ.x()
    for n in range(1, n_max + 1):
        if d**n > degree_cap:
            break
        power = phi.compose(power)
        total = _positive_valuation_sum(power - beta, p)
        values.append(-float(total) * math.log(p) / d**n if total else 0.0)
    if not values:
        raise ValueError("degree cap leaves no approximants")
    diffs = [abs(b - a) for a, b in zip(values, values[1:])]
    if len(diffs) >= 2:
        cauchy = diffs[-1] <= stall_tol and diffs[-1] <= diffs[-2] + 1e-15
    elif diffs:
        cauchy = diffs[-1] <= stall_tol
    else:
        cauchy = False
    return ApproximantSeries(p, beta, tuple(values), cauchy)
