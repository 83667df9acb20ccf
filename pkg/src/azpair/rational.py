"""Exact rationals, places of Q, p-adic valuations and prime support.

Rationals are plain :class:`fractions.Fraction` values; they are already
immutable, reduced and arbitrary precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Union

import gmpy2

RationalLike = Union[Fraction, int, str]

PRIME_BOUND = 10**6

# Deterministic Miller-Rabin witnesses, valid below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def to_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-3/4"`` to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(q)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")


@total_ordering
@dataclass(frozen=True)
class Place:
    """A place of Q: the archimedean one (``prime is None``) or a prime p."""

    prime: int | None = None

    def __post_init__(self) -> None:
        if self.prime is not None:
            _check_prime(self.prime)

    @classmethod
    def archimedean(cls) -> "Place":
        return cls(None)

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls(p)

    @property
    def is_archimedean(self) -> bool:
        return self.prime is None

    def _key(self) -> tuple[int, int]:
        return (0, 0) if self.prime is None else (1, self.prime)

    def __lt__(self, other: "Place") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        return "inf" if self.prime is None else str(self.prime)


ARCHIMEDEAN = Place.archimedean()


def _int_valuation(n: int, p: int) -> int:
    _, count = gmpy2.remove(gmpy2.mpz(n), p)
    return int(count)


def valuation(q: RationalLike, p: int) -> int:
    """Exponent of ``p`` in the nonzero rational ``q``."""
    q = to_rational(q)
    if q == 0:
        raise ValueError("valuation of zero undefined")
    _check_prime(p)
    return _int_valuation(q.numerator, p) - _int_valuation(q.denominator, p)


def log_abs(q: RationalLike, place: Place) -> float:
    """log |q|_v, with |p|_p = 1/p."""
    q = to_rational(q)
    if q == 0:
        raise ValueError("log of |0| undefined")
    if place.is_archimedean:
        return math.log(abs(q.numerator)) - math.log(q.denominator)
    return -valuation(q, place.prime) * math.log(place.prime)


def prime_factors(n: int, bound: int = PRIME_BOUND) -> set[int]:
    """Prime divisors of ``n`` by trial division up to ``bound``.

    A leftover cofactor is accepted if it is prime; otherwise a ValueError
    is raised since the factorisation is incomplete.
    """
    n = abs(n)
    found: set[int] = set()
    if n < 2:
        return found
    for p in (2, 3):
        if n % p == 0:
            found.add(p)
            while n % p == 0:
                n //= p
    p = 5
    while p <= bound and p * p <= n:
        for q in (p, p + 2):
            if n % q == 0:
                found.add(q)
                while n % q == 0:
                    n //= q
        p += 6
    if n > 1:
        if not is_prime(n):
            raise ValueError(
                f"cofactor {n} has no prime factor below {bound}; raise the prime bound"
            )
        found.add(n)
    return found


def support_primes(values: Iterable[RationalLike], bound: int = PRIME_BOUND) -> list[int]:
    """Sorted primes dividing some numerator or denominator; zeros are skipped."""
    primes: set[int] = set()
    for v in values:
        q = to_rational(v)
        if q == 0:
            continue
        primes |= prime_factors(q.numerator, bound)
        primes |= prime_factors(q.denominator, bound)
    return sorted(primes)
