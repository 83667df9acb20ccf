"""Backward-iteration sampling of the canonical measure on C.

A chain starts at beta and repeatedly replaces z by a uniformly chosen root
of phi(w) = z.  Roots are listed with multiplicity, so a root of
multiplicity m is picked with probability m/d.  Chains run in fixed blocks,
each seeded from (seed, block index), so the output never depends on how
many threads ran the blocks.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import TextIO

import numpy as np

from .polynomial import PolyQ
from .roots import coefficients_complex, solve_shifted

BLOCK_SIZE = 1024
EXCEPTIONAL_LEVELS = 3


class ExceptionalBetaError(ValueError):
    pass


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class MeasureSample:
    points: np.ndarray
    depth: int
    seed: int
    source_beta: complex

    def __post_init__(self):
        if self.points.size == 0:
            raise ValueError("a sample needs at least one point")

    @property
    def count(self) -> int:
        return int(self.points.size)

    def pushforward(self, phi: PolyQ) -> np.ndarray:
        return np.polyval(coefficients_complex(phi)[::-1], self.points)

    def to_csv(self, out: TextIO) -> None:
        writer = csv.writer(out)
        writer.writerow(["re", "im"])
        for z in self.points:
            writer.writerow([repr(float(z.real)), repr(float(z.imag))])


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    std_error: float
    clipped_mass: float
    clip_radius: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "clipped_mass": self.clipped_mass,
            "clip_radius": self.clip_radius,
        }


def thread_count() -> int:
    """Worker cap from AZPAIR_THREADS (default 1)."""
    raw = os.environ.get("AZPAIR_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _single_root(phi: PolyQ, z):
    """w with phi(x) - z = a_d (x - w)^d, or None.

    Exact when z is a Fraction; otherwise compared to a relative 1e-10.
    """
    d = phi.degree
    a = list(phi.coeffs)
    if isinstance(z, Fraction):
        exact = True
    else:
        exact = False
        a = [complex(float(c)) for c in a]
    a[0] = a[0] - z
    w = -a[d - 1] / (d * a[d])
    for i in range(d):
        target = a[d] * math.comb(d, i) * (-w) ** (d - i)
        if exact:
            if target != a[i]:
                return None
        elif abs(target - a[i]) > 1e-10 * (1 + abs(a[i]) + abs(target)):
            return None
    return w


def is_exceptional(phi: PolyQ, beta, levels: int = EXCEPTIONAL_LEVELS) -> bool:
    """True if beta has a single distinct preimage at each of ``levels`` consecutive levels.

    phi(x) - z has one distinct root exactly when it is a_d (x - w)^d, which
    is tested on the coefficients rather than on numerically computed roots
    (a d-fold root would split under rounding).
    """
    z = _exact_or_complex(beta)
    for _ in range(levels):
        z = _single_root(phi, z)
        if z is None:
            return False
    return True


def _exact_or_complex(beta):
    if isinstance(beta, (Fraction, int)):
        return Fraction(beta)
    beta = complex(beta)
    if beta.imag == 0:
        return Fraction(beta.real)
    return beta


def _float_orbit(phi: PolyQ, start: float, steps: int, escape: float = 1e12) -> list[float]:
    coeffs = [float(c) for c in phi.coeffs]
    orbit = [start]
    y = start
    for _ in range(steps):
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * y + c
        y = acc
        if not math.isfinite(y) or abs(y) > escape:
            break
        orbit.append(y)
    return orbit


def default_beta(phi: PolyQ, orbit_steps: int = 50, limit: int = 10_000) -> int:
    """Smallest positive integer at distance >= 1/2 from {phi^k(0) : k <= 50}.

    The orbit is followed in floats until it passes 1e12; every later point
    is even further out, so it cannot come near a small integer.
    """
    orbit = _float_orbit(phi, 0.0, orbit_steps)
    for b in range(1, limit + 1):
        if all(abs(b - y) >= 0.5 for y in orbit) and not is_exceptional(phi, b):
            return b
    raise ValueError("no admissible beta found")


def _run_block(phi_c: np.ndarray, beta: complex, depth: int, size: int, seed: int, block: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))
    d = phi_c.size - 1
    z = np.full(size, beta, dtype=np.complex128)
    rows = np.arange(size)
    for _ in range(depth):
        roots = solve_shifted(phi_c, z, rng)
        bad = ~np.all(np.isfinite(roots), axis=1)
        if bad.any():
            chain = block * BLOCK_SIZE + int(np.nonzero(bad)[0][0])
            raise SamplingError(f"root finding failed in chain {chain}")
        z = roots[rows, rng.integers(0, d, size=size)]
    return z


def backward_sample(
    phi: PolyQ,
    beta: complex,
    depth: int,
    count: int,
    seed: int,
    threads: int | None = None,
) -> MeasureSample:
    """``count`` independent chains of ``depth`` random backward steps from beta."""
    if phi.degree < 2:
        raise ValueError("degree must be >= 2")
    if depth < 1 or count < 1:
        raise ValueError("depth and count must be positive")
    if is_exceptional(phi, beta):
        raise ExceptionalBetaError("beta appears exceptional")
    beta = complex(beta)
    phi_c = coefficients_complex(phi)
    blocks = [(b, min(BLOCK_SIZE, count - b * BLOCK_SIZE)) for b in range(math.ceil(count / BLOCK_SIZE))]

    def work(item):
        block, size = item
        return _run_block(phi_c, beta, depth, size, seed, block)

    workers = threads if threads is not None else thread_count()
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(item) for item in blocks]
    return MeasureSample(np.concatenate(parts), depth, seed, beta)


def local_integral_arch(sample: MeasureSample, clip_eps: float = 1e-9) -> IntegralEstimate:
    """Mean of log|z| over the sample restricted to |z| < 1, clipped below at log(clip_eps)."""
    if not 0 < clip_eps < 1:
        raise ValueError("clip_eps must lie in (0, 1)")
    r = np.abs(sample.points)
    vals = np.zeros(r.size)
    inside = r < 1
    vals[inside] = np.log(np.maximum(r[inside], clip_eps))
    n = r.size
    value = math.fsum(vals) / n
    std = float(np.std(vals, ddof=1)) if n > 1 else 0.0
    return IntegralEstimate(value + 0.0, std / math.sqrt(n), float(np.mean(r < clip_eps)), clip_eps)


def clip_unstable(sample: MeasureSample, clip_eps: float = 1e-9) -> bool:
    """True when tightening the clip by 10x moves the estimate by more than 3 combined standard errors."""
    a = local_integral_arch(sample, clip_eps)
    b = local_integral_arch(sample, clip_eps / 10)
    return abs(a.value - b.value) > 3 * math.hypot(a.std_error, b.std_error)
