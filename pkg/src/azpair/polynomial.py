"""Dense univariate polynomials over Q.

Products go through integer Kronecker substitution, which keeps exact
iteration of quadratics up to degree a few thousand cheap.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .rational import RationalLike, to_rational

DEGREE_CAP = 8192


class DegreeCapError(ValueError):
    pass


class PolynomialParseError(ValueError):
    pass


def _lcm_denominators(coeffs: Iterable[Fraction]) -> int:
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return den


def _kronecker_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product of two integer coefficient lists (low to high)."""
    if not a or not b:
        return []
    bound = max(abs(x) for x in a) * max(abs(x) for x in b) * min(len(a), len(b))
    if bound == 0:
        return [0] * (len(a) + len(b) - 1)
    k = bound.bit_length() + 2

    def pack(cs: Sequence[int]) -> int:
        out = 0
        for c in reversed(cs):
            out = (out << k) + c
        return out

    prod = pack(a) * pack(b)
    n = len(a) + len(b) - 1
    mask = (1 << k) - 1
    half = 1 << (k - 1)
    out = []
    for _ in range(n):
        low = prod & mask
        if low >= half:
            low -= 1 << k
        out.append(low)
        prod = (prod - low) >> k
    return out


@dataclass(frozen=True)
class PolyQ:
    """Polynomial a_0 + a_1 x + ... + a_d x^d with exact rational coefficients."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [to_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    # -- construction -----------------------------------------------------
    @classmethod
    def x(cls) -> "PolyQ":
        return cls([0, 1])

    @classmethod
    def constant(cls, c: RationalLike) -> "PolyQ":
        return cls([c])

    @classmethod
    def monomial(cls, d: int, c: RationalLike = 1) -> "PolyQ":
        return cls([0] * d + [c])

    @classmethod
    def from_int_coeffs(cls, ints: Sequence[int], denominator: int = 1) -> "PolyQ":
        return cls(Fraction(c, denominator) for c in ints)

    # -- basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return not self.is_zero and self.coeffs[-1] == 1

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    # -- arithmetic -------------------------------------------------------
    def _int_form(self) -> tuple[list[int], int]:
        den = _lcm_denominators(self.coeffs)
        return [c.numerator * (den // c.denominator) for c in self.coeffs], den

    def __add__(self, other) -> "PolyQ":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyQ(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "PolyQ":
        return PolyQ(-c for c in self.coeffs)

    def __sub__(self, other) -> "PolyQ":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "PolyQ":
        return _as_poly(other) - self

    def __mul__(self, other) -> "PolyQ":
        other = _as_poly(other)
        if self.is_zero or other.is_zero:
            return PolyQ()
        a, da = self._int_form()
        b, db = other._int_form()
        return PolyQ.from_int_coeffs(_kronecker_mul(a, b), da * db)

    __rmul__ = __mul__

    def __truediv__(self, c: RationalLike) -> "PolyQ":
        c = to_rational(c)
        if c == 0:
            raise ZeroDivisionError("polynomial division by zero")
        return PolyQ(a / c for a in self.coeffs)

    def __pow__(self, k: int) -> "PolyQ":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = PolyQ([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def compose(self, inner: "PolyQ") -> "PolyQ":
        """self(inner(x)), by Horner in the polynomial ring."""
        result = PolyQ()
        for c in reversed(self.coeffs):
            result = result * inner + c
        return result

    def __call__(self, q: RationalLike) -> Fraction:
        return evaluate(self, q)

    def derivative(self) -> "PolyQ":
        return PolyQ(i * c for i, c in enumerate(self.coeffs) if i > 0)

    # -- representation ---------------------------------------------------
    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = "x" if i == 1 else f"x^{i}"
                if mag == 1:
                    body = mono
                elif mag.denominator == 1:
                    body = f"{mag}*{mono}"
                else:
                    body = f"({mag})*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"PolyQ({str(self)!r})"


def _as_poly(value) -> PolyQ:
    return value if isinstance(value, PolyQ) else PolyQ([value])


def evaluate(phi: PolyQ, q: RationalLike) -> Fraction:
    """Exact Horner evaluation."""
    q = to_rational(q)
    acc = Fraction(0)
    for c in reversed(phi.coeffs):
        acc = acc * q + c
    return acc


def iterate(phi: PolyQ, n: int, degree_cap: int = DEGREE_CAP) -> PolyQ:
    """n-fold composition of ``phi``; iterate(phi, 0) is x."""
    if phi.degree < 1:
        raise ValueError("iteration needs a polynomial of degree >= 1")
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    if phi.degree ** n > degree_cap:
        raise DegreeCapError(
            f"deg(phi)^n = {phi.degree}^{n} exceeds the degree cap {degree_cap}"
        )
    result = PolyQ.x()
    for _ in range(n):
        result = phi.compose(result)
    return result


@dataclass(frozen=True)
class PrimitiveIntPoly:
    """Content-1 integer polynomial with ``scale * poly == original``.

    The sign is normalised so the leading coefficient is positive.
    """

    coeffs: tuple[int, ...]
    scale: Fraction

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def to_polyq(self) -> PolyQ:
        return PolyQ(self.coeffs)


def to_primitive(phi: PolyQ) -> PrimitiveIntPoly:
    if phi.is_zero:
        raise ValueError("zero polynomial has no primitive form")
    ints, den = phi._int_form()
    content = 0
    for c in ints:
        content = math.gcd(content, c)
    if ints[-1] < 0:
        content = -content
    return PrimitiveIntPoly(tuple(c // content for c in ints), Fraction(content, den))


# -- parsing -----------------------------------------------------------------

_TERM = re.compile(
    r"""
    (?P<coef>\(?\s*\d+(?:\s*/\s*\d+)?\s*\)?)?   # optional coefficient, maybe a/b
    \s*\*?\s*
    (?:(?P<var>[a-z])\s*(?:(?:\^|\*\*)\s*(?P<exp>\d+))?)?
    (?:\s*/\s*(?P<div>\d+))?                   # trailing divisor, as in x/2
    """,
    re.VERBOSE,
)


def parse_poly(text: str) -> PolyQ:
    """Parse strings like ``"x^2 - 1/2"``, ``"3x^3 + (2/5)*x"`` or ``"x**2+5"``."""
    s = text.strip().lower()
    if not s:
        raise PolynomialParseError("empty polynomial string")
    if s.startswith("["):
        return poly_from_json(s)
    tokens = _split_terms(s)
    if not tokens:
        raise PolynomialParseError(f"no terms in {text!r}")
    coeffs: dict[int, Fraction] = {}
    var_name = None
    for tok in tokens:
        negative = False
        body = tok
        while body and body[0] in "+-":
            negative ^= body[0] == "-"
            body = body[1:].strip()
        m = _TERM.fullmatch(body)
        if m is None or (m.group("coef") is None and m.group("var") is None):
            raise PolynomialParseError(f"cannot parse term {body!r} in {text!r}")
        coef_txt = m.group("coef")
        if coef_txt is None:
            coef = Fraction(1)
        else:
            coef_txt = coef_txt.replace("(", "").replace(")", "").replace(" ", "")
            try:
                coef = to_rational(coef_txt)
            except (ValueError, ZeroDivisionError) as exc:
                raise PolynomialParseError(f"bad coefficient {coef_txt!r}") from exc
        if m.group("div") is not None:
            if m.group("var") is None or int(m.group("div")) == 0:
                raise PolynomialParseError(f"bad divisor in term {body!r}")
            coef /= int(m.group("div"))
        if m.group("var") is None:
            exp = 0
        else:
            if var_name is None:
                var_name = m.group("var")
            elif var_name != m.group("var"):
                raise PolynomialParseError(f"more than one variable in {text!r}")
            exp = int(m.group("exp")) if m.group("exp") else 1
        coeffs[exp] = coeffs.get(exp, Fraction(0)) + (-coef if negative else coef)
    top = max(coeffs)
    return PolyQ(coeffs.get(i, 0) for i in range(top + 1))


def _split_terms(s: str) -> list[str]:
    terms: list[str] = []
    cur = ""
    depth = 0
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if (
            ch in "+-"
            and depth == 0
            and cur.strip().lstrip("+-").strip()
            and not cur.rstrip().endswith(("^", "*", "/"))
        ):
            terms.append(cur.strip())
            cur = ch
        else:
            cur += ch
    if depth != 0:
        raise PolynomialParseError(f"unbalanced parentheses in {s!r}")
    if cur.strip():
        terms.append(cur.strip())
    for t in terms:
        if not t.lstrip("+-").strip():
            raise PolynomialParseError(f"dangling sign in {s!r}")
    return terms


def poly_from_json(payload: str | Sequence) -> PolyQ:
    """Low-to-high coefficient array; entries may be ints or ``"a/b"`` strings."""
    data = json.loads(payload) if isinstance(payload, str) else payload
    if not isinstance(data, list):
        raise PolynomialParseError("coefficient JSON must be an array")
    try:
        return PolyQ(to_rational(c) if not isinstance(c, float) else _float_exact(c) for c in data)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise PolynomialParseError(str(exc)) from exc


def _float_exact(c: float) -> Fraction:
    if not c.is_integer():
        raise PolynomialParseError(f"non-integer float coefficient {c!r}; use an 'a/b' string")
    return Fraction(int(c))
