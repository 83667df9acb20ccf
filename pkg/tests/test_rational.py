import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from azpair.rational import (
    ARCHIMEDEAN,
    Place,
    is_prime,
    log_abs,
    prime_factors,
    support_primes,
    to_rational,
    valuation,
)

from conftest import rationals

PRIMES = [2, 3, 5, 7, 11, 13]


def naive_valuation(q: Fraction, p: int) -> int:
    def count(n):
        k = 0
        n = abs(n)
        while n % p == 0:
            n //= p
            k += 1
        return k

    return count(q.numerator) - count(q.denominator)


def test_to_rational_forms():
    assert to_rational("-3/4") == Fraction(-3, 4)
    assert to_rational(" 7 ") == 7
    assert to_rational(Fraction(2, 4)) == Fraction(1, 2)
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)


@pytest.mark.parametrize("q,p,v", [(12, 2, 2), (Fraction(1, 2), 2, -1), (Fraction(5, 9), 3, -2), (7, 3, 0)])
def test_valuation_examples(q, p, v):
    assert valuation(q, p) == v


def test_valuation_errors():
    with pytest.raises(ValueError, match="valuation of zero undefined"):
        valuation(0, 2)
    with pytest.raises(ValueError):
        valuation(4, 6)


def test_log_abs_examples():
    for place in (ARCHIMEDEAN, Place.finite(2), Place.finite(5)):
        assert log_abs(1, place) == 0
    assert log_abs(Fraction(1, 2), Place.finite(2)) == pytest.approx(math.log(2))
    assert log_abs(-3, ARCHIMEDEAN) == pytest.approx(math.log(3))
    with pytest.raises(ValueError):
        log_abs(0, ARCHIMEDEAN)


def test_support_primes_examples():
    assert support_primes([Fraction(1, 2), 3]) == [2, 3]
    assert support_primes([1]) == []
    assert support_primes([]) == []
    assert support_primes([Fraction(-10, 21)]) == [2, 3, 5, 7]
    assert support_primes([0, 5]) == [5]


def test_places_order_archimedean_first():
    places = [Place.finite(5), ARCHIMEDEAN, Place.finite(2)]
    assert sorted(places) == [ARCHIMEDEAN, Place.finite(2), Place.finite(5)]
    with pytest.raises(ValueError):
        Place.finite(9)


def test_is_prime_against_sieve():
    n = 5000
    sieve = [True] * n
    sieve[0] = sieve[1] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = [False] * len(sieve[i * i :: i])
    assert [is_prime(k) for k in range(n)] == sieve
    assert is_prime(2**61 - 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


@given(st.integers(1, 10**9))
def test_prime_factors_cover_n(n):
    fs = prime_factors(n)
    m = n
    for p in fs:
        assert is_prime(p)
        while m % p == 0:
            m //= p
    assert m == 1


@given(rationals(nonzero=True), rationals(nonzero=True), st.sampled_from(PRIMES))
def test_valuation_is_additive(q, r, p):
    assert valuation(q * r, p) == valuation(q, p) + valuation(r, p)
    assert valuation(q, p) == naive_valuation(q, p)


@given(rationals(nonzero=True), rationals(nonzero=True), st.sampled_from(PRIMES))
def test_ultrametric_inequality(q, r, p):
    if q + r == 0:
        return
    vq, vr = valuation(q, p), valuation(r, p)
    v = valuation(q + r, p)
    assert v >= min(vq, vr)
    if vq != vr:
        assert v == min(vq, vr)


@given(rationals(max_num=10**6, max_den=10**6, nonzero=True))
def test_product_formula(q):
    total = log_abs(q, ARCHIMEDEAN) + sum(log_abs(q, Place.finite(p)) for p in support_primes([q]))
    assert abs(total) < 1e-12 * max(1.0, abs(log_abs(q, ARCHIMEDEAN)))
