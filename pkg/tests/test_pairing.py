import json
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from azpair.config import RunConfig
from azpair.heights import canonical_height, weil_height
from azpair.measure import ExceptionalBetaError
from azpair.pairing import (
    EqualityCase,
    Method,
    UnsupportedInputError,
    archimedean_certificate,
    conjugated_squaring_map,
    conjugated_squaring_pairing,
    equality_certificate,
    height_difference_bound,
    pairing_via_preimages,
    pairing_via_theorem1,
    quad_family_bounds,
    rigidity_check,
)
from azpair.polynomial import PolyQ, parse_poly
from azpair.quadrature import chebyshev_integral

from conftest import monic_int_polys, rationals

CHEB = 0.32306594721945
FAST = RunConfig(samples=3000, depth=25, seed=3)


def quad(c):
    return PolyQ([Fraction(c), 0, 1])


def float_escapes(phi, z, steps=200, bound=1e8):
    coeffs = [complex(float(c)) for c in phi.coeffs][::-1]
    for _ in range(steps):
        z = np.polyval(coeffs, z)
        if abs(z) > bound:
            return True
    return False


@pytest.fixture(scope="module")
def cheb_report():
    return pairing_via_theorem1(parse_poly("x^2 - 2"), FAST)


def test_chebyshev_pairing(cheb_report):
    r = cheb_report
    assert abs(r.value - CHEB) <= r.error_radius
    assert r.h_phi_zero.value == 0
    assert r.equality_case is EqualityCase.LOWER_BOUND_ONLY
    assert not r.rigorous
    assert r.per_place[0].method is Method.MONTE_CARLO
    assert r.per_place[1].method is Method.GOOD_REDUCTION


@pytest.mark.parametrize("f", ["x^2", "x^3", "x^5"])
def test_power_maps_pair_to_zero(f):
    r = pairing_via_theorem1(parse_poly(f), FAST)
    assert r.value == 0 and r.error_radius < 1e-9
    assert r.equality_case is EqualityCase.PROVEN_EQUAL and r.rigorous


def test_escaping_family_equals_height():
    r = pairing_via_theorem1(quad(5))
    assert r.value == r.h_phi_zero.value
    assert r.value == pytest.approx(0.8509922495127937, abs=1e-8)
    assert r.equality_case is EqualityCase.PROVEN_EQUAL
    assert [c.method for c in r.per_place] == [Method.LEMMA_DISJOINT, Method.GOOD_REDUCTION]
    assert r.per_place[0].detail == {"certificate": "escape"}


def test_disjointness_at_half():
    r = pairing_via_theorem1(quad(Fraction(1, 2)), FAST)
    p2 = [c for c in r.per_place if str(c.place) == "2"][0]
    assert p2.method is Method.LEMMA_DISJOINT and p2.contribution == 0


def test_series_place_reported():
    r = pairing_via_theorem1(parse_poly("x^2 + x/2"), FAST)
    p2 = [c for c in r.per_place if str(c.place) == "2"][0]
    assert p2.method is Method.NEWTON_POLYGON_SERIES
    assert len(p2.detail["approximants"]) == FAST.n_max
    assert p2.contribution <= 0


@pytest.mark.parametrize("f", ["x^2 - 2", "x^2 + 2x", "x^2 + 1/2", "x^3 - x", "x^2 + 5", "x^2 + x/2"])
def test_report_is_consistent(f):
    r = pairing_via_theorem1(parse_poly(f), FAST)
    total = r.h_phi_zero.value - math.fsum(c.contribution for c in r.per_place)
    assert abs(r.value - total) <= 1e-12
    assert r.error_radius == pytest.approx(r.h_phi_zero.error_radius + math.fsum(c.error for c in r.per_place))
    if r.equality_case is EqualityCase.PROVEN_EQUAL:
        assert all(c.contribution == 0 for c in r.per_place)
    # every local integral is over a unit disk, so is <= 0
    assert all(c.contribution <= 0 for c in r.per_place)
    assert r.value >= r.h_phi_zero.value - r.error_radius


def test_report_json_round_trip(cheb_report):
    d = json.loads(cheb_report.to_json())
    assert d["schema"] == 1
    assert d["config"] == FAST.to_dict()
    assert d["per_place"][0]["method"] == "MonteCarlo"
    assert "std_error" in d["per_place"][0]


def test_non_monic_scope():
    with pytest.raises(UnsupportedInputError):
        pairing_via_theorem1(parse_poly("2x^2 + 1"), FAST)
    r = pairing_via_theorem1(parse_poly("-x^2 + 5"), FAST)
    assert r.value >= r.h_phi_zero.value - r.error_radius


def test_linear_rejected():
    with pytest.raises(ValueError):
        pairing_via_theorem1(parse_poly("x + 1"))


def test_exceptional_beta_override():
    with pytest.raises(ExceptionalBetaError):
        pairing_via_theorem1(parse_poly("x^2"), RunConfig(beta="0"))


@pytest.mark.parametrize(
    "f,case",
    [
        ("x^2", EqualityCase.PROVEN_EQUAL),
        ("x^2 + 5", EqualityCase.PROVEN_EQUAL),
        ("x^2 - 7", EqualityCase.PROVEN_EQUAL),
        ("x^2 - 2", EqualityCase.LOWER_BOUND_ONLY),
        ("x^2 + x/2", EqualityCase.LOWER_BOUND_ONLY),
    ],
)
def test_equality_certificate(f, case):
    assert equality_certificate(parse_poly(f)) is case


@pytest.mark.parametrize("c", [4, 5, -7, Fraction(7, 2), -10, 100])
def test_large_c_certified(c):
    assert archimedean_certificate(quad(c)) == "escape"


@pytest.mark.parametrize("c", [-2, -1, 0, Fraction(1, 2), 1])
def test_small_c_not_certified_by_escape(c):
    assert archimedean_certificate(quad(c)) != "escape"


@settings(max_examples=25)
@given(monic_int_polys(bound=30) | rationals(max_num=60, max_den=4).map(quad))
def test_escape_certificate_is_sound(phi):
    if archimedean_certificate(phi) != "escape":
        return
    rng = np.random.default_rng(0)
    r = np.sqrt(rng.uniform(0, 1, 300))
    pts = r * np.exp(2j * np.pi * rng.uniform(0, 1, 300))
    pts = np.concatenate([pts, np.exp(2j * np.pi * np.arange(64) / 64), [0]])
    assert all(float_escapes(phi, z) for z in pts)


def test_preimage_estimator_power_map():
    # ln(3)/2^n halves each step, so the stall diagnostic fires
    with pytest.warns(RuntimeWarning, match="still moving"):
        series = pairing_via_preimages(parse_poly("x^2"), 3, 8)
    for n, v in series:
        assert v == pytest.approx(math.log(3) / 2**n, abs=1e-12)


@pytest.mark.parametrize("c", [4, 5, -7])
def test_preimage_estimator_escaping(c):
    h = canonical_height(quad(c), 0).value
    series = pairing_via_preimages(quad(c), 1, 10)
    assert abs(series[-1][1] - h) < 1e-3


def test_preimage_estimator_rejects_bad_beta():
    with pytest.raises(ExceptionalBetaError):
        pairing_via_preimages(parse_poly("x^2"), 0, 3)
    with pytest.raises(ValueError):
        pairing_via_preimages(parse_poly("x^2 - 2"), 2, 3)


def test_preimage_estimator_degree_cap():
    with pytest.warns(RuntimeWarning, match="degree cap"):
        series = pairing_via_preimages(parse_poly("x^2 - 2"), 1, 10, degree_cap=64)
    assert [n for n, _ in series] == [1, 2, 3, 4, 5, 6]


@pytest.mark.parametrize("f", ["x^2", "x^2 - 2", "x^2 + 5", "x^2 - 1", "x^2 + 1/2", "x^3 - x"])
def test_estimators_agree(f):
    phi = parse_poly(f)
    a = pairing_via_theorem1(phi, FAST)
    n_max = 10 if phi.degree == 2 else 7
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        b = pairing_via_preimages(phi, a.beta, n_max)
    assert abs(a.value - b[-1][1]) <= 3 * (a.error_radius + 1e-3)


@pytest.mark.parametrize("c", [-3, -1, Fraction(1, 2), 2, 5, 17])
def test_quadratic_bracket(c):
    r = pairing_via_theorem1(quad(c), FAST)
    b = quad_family_bounds(c)
    assert b.lower - r.error_radius <= r.value <= b.upper + r.error_radius


def test_quadratic_bracket_exact_cases():
    assert quad_family_bounds(0).exact == 0.0
    assert quad_family_bounds(-2).exact is None
    assert quad_family_bounds(Fraction(341, 100)).exact is None  # 3.41 < 2 + sqrt 2
    assert quad_family_bounds(Fraction(342, 100)).exact is not None
    b = quad_family_bounds(5)
    assert b.lower <= b.exact <= b.upper
    assert b.upper - b.lower == pytest.approx(math.log(6))


def test_conjugated_squaring():
    assert conjugated_squaring_pairing(2, 1) == pytest.approx(math.log(2), abs=1e-8)
    assert conjugated_squaring_pairing(1, 1) == pytest.approx(chebyshev_integral(1e-10), abs=1e-8)
    assert conjugated_squaring_pairing(1, 0) == 0
    assert conjugated_squaring_map(1, 1) == parse_poly("x^2 + 2x")
    assert conjugated_squaring_map(2, 1) == parse_poly("2x^2 + 2x")
    with pytest.raises(ValueError):
        conjugated_squaring_pairing(0, 1)


@given(rationals(max_num=20, max_den=20, nonzero=True), rationals(max_num=20, max_den=20))
def test_conjugated_squaring_lower_bound(a, b):
    # a pairing is nonnegative
    assert conjugated_squaring_pairing(a, b) >= -1e-9


def test_conjugated_matches_estimator_a():
    r = pairing_via_theorem1(parse_poly("x^2 + 2x"), FAST)
    assert abs(r.value - conjugated_squaring_pairing(1, 1)) <= r.error_radius


def test_height_difference_bound(cheb_report):
    phi = parse_poly("x^2 - 2")
    bound = height_difference_bound(phi, cheb_report)
    assert bound == pytest.approx(CHEB + math.log(2), abs=cheb_report.error_radius)
    for z in [Fraction(1, 2), Fraction(3, 7), Fraction(-5, 3), 7]:
        diff = canonical_height(phi, z, eps=1e-5).value - weil_height(z)
        assert diff <= CHEB + math.log(2) + 0.01
    with pytest.raises(ValueError):
        height_difference_bound(parse_poly("x^2"), cheb_report)


@pytest.mark.parametrize(
    "f,expected",
    [
        ("x^3", (True, True, True, True)),
        ("x^2", (True, True, True, True)),
        ("x^2 - 1", (True, False, False, False)),
        ("x^2 + 5", (False, True, False, False)),
        ("x^2 - 2", (True, False, False, False)),
    ],
)
def test_rigidity(f, expected):
    r = rigidity_check(parse_poly(f))
    assert (r.zero_preperiodic, r.disk_disjoint, r.hypotheses_hold, r.conclusion_is_power_map) == expected
    assert not r.contradiction


@settings(max_examples=40)
@given(monic_int_polys())
def test_rigidity_never_contradicted(phi):
    assert not rigidity_check(phi, max_steps=200).contradiction


def test_rigidity_input_checks():
    with pytest.raises(ValueError):
        rigidity_check(parse_poly("x^2 + 1/2"))
