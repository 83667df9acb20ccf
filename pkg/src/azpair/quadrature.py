"""Closed-form constants: the Chebyshev log integral, L(2, chi_3) and I(a, b).

Integrals use a small adaptive Gauss-Kronrod (7/15) routine.  The two
logarithmic singularities that occur are split off analytically, so the
adaptive routine only ever sees smooth integrands.
"""
from __future__ import annotations

import heapq
import math
from typing import Callable

import numpy as np

# Kronrod 15-point nodes on [-1, 1] (non-negative half) and weights; the
# odd-indexed nodes are the 7-point Gauss nodes.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KW = np.concatenate([_WK[:-1], _WK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


class QuadratureError(RuntimeError):
    pass


def _gk15(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = f(mid + half * _NODES)
    k = half * float(np.dot(_KW, vals))
    g = half * float(np.dot(_GW, vals))
    return k, abs(k - g)


def adaptive_gk(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_intervals: int = 2000,
) -> tuple[float, float]:
    """Integral of a vectorised ``f`` over [a, b] and an error estimate.

    Splits the interval with the largest Kronrod-Gauss discrepancy until the
    summed discrepancy drops below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0, 0.0
    value, err = _gk15(f, a, b)
    heap = [(-err, a, b, value)]
    total_err = err
    while total_err > tol:
        if len(heap) >= max_intervals:
            raise QuadratureError(f"no convergence within {max_intervals} intervals (error {total_err:.2e})")
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
    return math.fsum(item[3] for item in heap), total_err


def _log_sinc_half(s: np.ndarray) -> np.ndarray:
    """log(2 sin(s/2) / s), smooth on [0, pi] with value 0 at s = 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    nz = s != 0
    out[nz] = np.log(2 * np.sin(s[nz] / 2) / s[nz])
    return out


def log_chord_integral(T: float, tol: float = 1e-12) -> float:
    """Integral of log(2 sin(s/2)) over [0, T], for 0 <= T <= pi.

    The log s part is integrated exactly; what remains is smooth.
    """
    if not 0 <= T <= math.pi:
        raise ValueError("T must lie in [0, pi]")
    if T == 0:
        return 0.0
    smooth, _ = adaptive_gk(_log_sinc_half, 0.0, T, tol)
    return T * (math.log(T) - 1) + smooth


def chebyshev_integral(tol: float = 1e-8) -> float:
    """-(1/2pi) * integral over [-1, 1] of log|x| / sqrt(1 - x^2/4).

    With x = 2 sin(t/2) this is -(1/pi) * integral of log(2 sin(t/2)) over
    [0, pi/3].
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    return -log_chord_integral(math.pi / 3, tol * math.pi / 2) / math.pi


def l_chi3_tail_bound(K: int) -> float:
    """Bound on the sum of the terms k >= K of L(2, chi_3)."""
    a = 3 * K + 1
    return 3 / a**3 + 1 / (2 * a**2)


def dirichlet_L_chi3(tol: float = 1e-12) -> float:
    """L(2, chi_3) = sum over k >= 0 of 1/(3k+1)^2 - 1/(3k+2)^2."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    K = 1
    while l_chi3_tail_bound(K) > tol:
        K *= 2
    k = np.arange(K, dtype=float)
    terms = 1 / (3 * k + 1) ** 2 - 1 / (3 * k + 2) ** 2
    # Terms are positive and decreasing: summing small to large limits rounding.
    return math.fsum(terms[::-1])


def chebyshev_closed_form(tol: float = 1e-12) -> float:
    """(3 sqrt 3 / 4 pi) * L(2, chi_3)."""
    return 3 * math.sqrt(3) / (4 * math.pi) * dirichlet_L_chi3(tol)


def _kink_angle(a: float, b: float) -> float:
    """Angle phi* in [0, pi] where |b + e^{i phi}| = a; the modulus decreases in phi,
    so the minimum in I(a, b) is a exactly on [0, phi*]."""
    if a >= 1 + b:
        return 0.0
    if a <= abs(1 - b):
        return math.pi
    c = (a * a - b * b - 1) / (2 * b)
    return math.acos(min(1.0, max(-1.0, c)))


def I_integral(a: float, b: float, tol: float = 1e-10) -> float:
    """I(a, b) = -integral over theta in [0, 1] of log min(a, |b + e^{2 pi i theta}|).

    By symmetry this is -(1/pi) times the integral over phi in [0, pi].  Up to
    the kink phi* the minimum is a; past it the integrand is
    (1/2) log(b^2 + 2b cos phi + 1), which for b = 1 becomes
    log(2 sin(s/2)) with s = pi - phi.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    if not b >= 0:
        raise ValueError("b must be nonnegative")
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = float(a), float(b)
    if b == 0:
        return -math.log(min(a, 1.0)) + 0.0
    kink = _kink_angle(a, b)
    flat = kink * math.log(a)
    if kink == math.pi:
        return -flat / math.pi + 0.0
    if b == 1:
        curved = log_chord_integral(math.pi - kink, tol)
    else:
        def integrand(phi):
            return 0.5 * np.log(b * b + 2 * b * np.cos(phi) + 1)

        # Near b = 1 the integrand dips sharply at phi = pi; a split at the
        # dip width keeps the adaptive routine from starving.
        width = min(math.pi - kink, max(abs(1 - b), 1e-12) * 4)
        split = math.pi - width
        left, _ = adaptive_gk(integrand, kink, split, tol / 2) if split > kink else (0.0, 0.0)
        right, _ = adaptive_gk(integrand, max(split, kink), math.pi, tol / 2)
        curved = left + right
    return -(flat + curved) / math.pi + 0.0
