"""Simultaneous (Aberth-Ehrlich) root finding.

Two entry points:

* :func:`complex_roots` works on one exact polynomial in multiprecision and
  returns multiplicity clusters with inclusion radii.
* :func:`aberth_batch` solves many small polynomials of equal degree at once
  in complex128; the backward samplers and preimage trees are built on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .polynomial import PolyQ, to_primitive

MAX_PREC = 1024
CLUSTER_FACTOR = 10.0


class RootFindingError(RuntimeError):
    """Raised when the iteration fails to converge.

    ``best`` holds the last iterate and ``residuals`` the |f(z)| values there.
    """

    def __init__(self, message: str, best=None, residuals=None):
        super().__init__(message)
        self.best = best
        self.residuals = residuals


@dataclass(frozen=True)
class RootCluster:
    center: complex
    multiplicity: int
    residual_radius: float


@dataclass
class _Workspace:
    coeffs: list  # mpc, low to high
    abs_coeffs: list  # mpf
    prec: int
    eps: object = field(init=False)

    def __post_init__(self):
        self.eps = mpmath.mpf(2) ** (-self.prec)


def _horner(coeffs, z):
    p = coeffs[-1]
    dp = mpmath.mpc(0)
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _noise(ws: _Workspace, z) -> object:
    # Running-error style bound for Horner: a few units of roundoff times the
    # absolute polynomial evaluated at |z|.
    r = abs(z)
    acc = mpmath.mpf(0)
    for c in reversed(ws.abs_coeffs):
        acc = acc * r + c
    return 4 * len(ws.coeffs) * ws.eps * acc


def _initial_ring(coeffs, rng: np.random.Generator):
    d = len(coeffs) - 1
    lead = abs(coeffs[-1])
    radius = 1 + max(abs(c) / lead for c in coeffs[:-1])
    phases = (2 * math.pi * np.arange(d) / d) + rng.uniform(0, 2 * math.pi / d, size=d)
    return [mpmath.mpc(radius * math.cos(t), radius * math.sin(t)) for t in phases]


def _aberth(ws: _Workspace, z: list, tol: float, max_iter: int):
    d = len(z)
    done = [False] * d
    for _ in range(max_iter):
        for i in range(d):
            if done[i]:
                continue
            p, dp = _horner(ws.coeffs, z[i])
            if abs(p) <= _noise(ws, z[i]):
                done[i] = True
                continue
            if dp == 0:
                z[i] += mpmath.mpc(ws.eps, ws.eps) * (1 + abs(z[i]))
                continue
            ratio = p / dp
            s = mpmath.fsum(1 / (z[i] - z[j]) for j in range(d) if j != i and z[i] != z[j])
            step = ratio / (1 - ratio * s)
            z[i] -= step
            if abs(step) <= 2 * ws.eps * max(1, abs(z[i])):
                done[i] = True
        if all(done):
            return z, True
    return z, False


def _weierstrass_radii(ws: _Workspace, z: list) -> list[float]:
    d = len(z)
    lead = ws.coeffs[-1]
    radii = []
    for i in range(d):
        p, _ = _horner(ws.coeffs, z[i])
        denom = lead
        for j in range(d):
            if j != i:
                denom *= z[i] - z[j]
        num = abs(p) + _noise(ws, z[i])
        if denom == 0:
            radii.append(math.inf)
        else:
            radii.append(float(d * num / abs(denom)))
    return radii


def _cluster(z: list, radii: list[float]) -> list[list[int]]:
    d = len(z)
    parent = list(range(d))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(d):
        for j in range(i + 1, d):
            gap = float(abs(z[i] - z[j]))
            if gap <= CLUSTER_FACTOR * max(radii[i], radii[j]):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(d):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: min(g))


def _polish_multiple(coeffs, center, m: int, iters: int = 8):
    """Newton on the (m-1)-th derivative: quadratic convergence to an m-fold root."""
    if m == 1:
        return center
    deriv = list(coeffs)
    for _ in range(m - 1):
        deriv = [k * deriv[k] for k in range(1, len(deriv))]
    z = center
    for _ in range(iters):
        p, dp = _horner(deriv, z)
        if dp == 0:
            break
        step = p / dp
        z -= step
        if abs(step) <= mpmath.mpf(2) ** (-mpmath.mp.prec) * max(1, abs(z)):
            break
    return z


def _working_precision(ints) -> int:
    bits = max(abs(c).bit_length() for c in ints)
    return max(53, min(MAX_PREC, bits))


def complex_roots(
    f: PolyQ,
    tol: float = 1e-12,
    *,
    seed: int = 0,
    max_iter: int = 500,
    prec: int | None = None,
) -> list[RootCluster]:
    """All complex roots of ``f`` as multiplicity clusters.

    The iteration stops once every approximation is at the rounding-noise
    level or moves by less than a unit of working precision.  Each cluster's
    radius comes from the Weierstrass inclusion disks (a union of m
    overlapping disks holds exactly m roots), so the cluster disk holds
    ``multiplicity`` true roots counted with multiplicity.  ``tol`` is the
    radius a simple root must reach; failing that raises RootFindingError.
    """
    if f.degree < 1:
        raise ValueError("root finding needs degree >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    prim = to_primitive(f)
    ints = prim.coeffs
    work_prec = prec if prec is not None else _working_precision(ints)
    rng = np.random.default_rng(seed)
    with mpmath.workprec(work_prec):
        coeffs = [mpmath.mpc(c) for c in ints]
        # Roots at zero are exact; strip them first.
        zeros = 0
        while zeros < len(ints) - 1 and ints[zeros] == 0:
            zeros += 1
        core = coeffs[zeros:]
        out: list[RootCluster] = []
        if zeros:
            out.append(RootCluster(0j, zeros, 0.0))
        if len(core) == 1:
            return out
        ws_core = _Workspace(core, [abs(c) for c in core], work_prec)
        z = _initial_ring(core, rng)
        z, converged = _aberth(ws_core, z, tol, max_iter)
        radii = _weierstrass_radii(ws_core, z)
        if not converged and max(radii) > tol:
            residuals = [float(abs(_horner(core, zi)[0])) for zi in z]
            raise RootFindingError(
                f"Aberth iteration did not converge in {max_iter} steps",
                best=[complex(zi) for zi in z],
                residuals=residuals,
            )
        for group in _cluster(z, radii):
            m = len(group)
            center = mpmath.fsum(z[i] for i in group) / m
            spread = max(float(abs(z[i] - center)) + radii[i] for i in group)
            if m > 1:
                polished = _polish_multiple(core, center, m)
                if abs(polished - center) <= spread:
                    spread = max(spread, float(abs(polished - center)))
                    center = polished
            out.append(RootCluster(complex(center), m, spread))
    return out


# -- batched complex128 solver ----------------------------------------------


def aberth_batch(
    coeffs: np.ndarray,
    *,
    rng: np.random.Generator | None = None,
    max_iter: int = 200,
) -> np.ndarray:
    """Roots of many polynomials of one degree, shape (batch, d+1) -> (batch, d).

    Coefficients are low to high.  Rows that stall fall back to companion
    eigenvalues, so every row returns d roots listed with multiplicity.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.ndim == 1:
        coeffs = coeffs[None, :]
    batch, width = coeffs.shape
    d = width - 1
    if d < 1:
        raise ValueError("degree must be >= 1")
    monic = coeffs / coeffs[:, -1:]
    if d == 1:
        return -monic[:, :1]
    rng = rng if rng is not None else np.random.default_rng(0)
    radius = 1 + np.max(np.abs(monic[:, :-1]), axis=1)
    phase = 2 * np.pi * np.arange(d) / d + rng.uniform(0, 2 * np.pi / d, size=(batch, d))
    z = radius[:, None] * np.exp(1j * phase)
    # Horner on all (row, root) pairs at once.
    dcoef = monic[:, 1:] * np.arange(1, d + 1)
    active = np.ones(batch, dtype=bool)
    scale = np.sum(np.abs(monic), axis=1)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        zz = z[idx]
        p = np.zeros_like(zz) + monic[idx, -1:]
        for k in range(d - 1, -1, -1):
            p = p * zz + monic[idx, k : k + 1]
        dp = np.zeros_like(zz) + dcoef[idx, -1:]
        for k in range(d - 2, -1, -1):
            dp = dp * zz + dcoef[idx, k : k + 1]
        diff = zz[:, :, None] - zz[:, None, :]
        eye = np.eye(d, dtype=bool)[None]
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(eye, 0, 1 / np.where(eye, 1, diff))
            s = inv.sum(axis=2)
            ratio = np.where(dp != 0, p / dp, 0)
            step = ratio / (1 - ratio * s)
        step = np.where(np.isfinite(step), step, 0)
        zz = zz - step
        z[idx] = zz
        big = np.maximum(1, np.abs(zz))
        small = np.all(np.abs(step) <= 4e-16 * big, axis=1)
        noise = np.all(np.abs(p) <= 1e-14 * (scale[idx, None] * big**d), axis=1)
        active[idx[small | noise]] = False
    if active.any():
        idx = np.nonzero(active)[0]
        z[idx] = _companion_roots(monic[idx])
    return z


def _companion_roots(monic: np.ndarray) -> np.ndarray:
    batch, width = monic.shape
    d = width - 1
    comp = np.zeros((batch, d, d), dtype=np.complex128)
    comp[:, 1:, :-1] = np.eye(d - 1)
    comp[:, :, -1] = -monic[:, :-1]
    return np.linalg.eigvals(comp)


def coefficients_complex(phi: PolyQ) -> np.ndarray:
    return np.array([complex(float(c)) for c in phi.coeffs], dtype=np.complex128)


def solve_shifted(phi_c: np.ndarray, targets: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Roots w of phi(w) = t for each target t; shape (len(targets), d)."""
    targets = np.asarray(targets, dtype=np.complex128)
    rows = np.tile(phi_c, (targets.size, 1))
    rows[:, 0] -= targets
    return aberth_batch(rows, rng=rng)


def preimage_roots(phi: PolyQ, beta: complex, n: int, *, seed: int = 0) -> np.ndarray:
    """All d^n solutions of phi^n(w) = beta, listed with multiplicity.

    Built level by level: phi^n(w) - beta factors as the product of
    phi(w) - u over the roots u of phi^(n-1)(u) = beta.
    """
    if phi.degree < 1:
        raise ValueError("degree must be >= 1")
    rng = np.random.default_rng(seed)
    phi_c = coefficients_complex(phi)
    level = np.array([beta], dtype=np.complex128)
    for _ in range(n):
        level = solve_shifted(phi_c, level, rng).reshape(-1)
    return _polish_composed(phi_c, level, beta, n)


def _polish_composed(phi_c: np.ndarray, w: np.ndarray, beta: complex, n: int, steps: int = 2) -> np.ndarray:
    """Safeguarded Newton on phi^n(w) - beta evaluated by composition."""
    if n == 0:
        return w
    dphi = phi_c[1:] * np.arange(1, phi_c.size)

    def residual(x):
        y = x.copy()
        deriv = np.ones_like(x)
        for _ in range(n):
            deriv = deriv * np.polyval(dphi[::-1], y)
            y = np.polyval(phi_c[::-1], y)
        return y - beta, deriv

    with np.errstate(all="ignore"):
        for _ in range(steps):
            r, dr = residual(w)
            cand = w - r / dr
            r2, _ = residual(cand)
            # Small moves only: a long Newton step may jump to a neighbouring root.
            short = np.abs(cand - w) <= 1e-8 * (1 + np.abs(w))
            better = np.isfinite(cand) & short & (np.abs(r2) < np.abs(r))
            w = np.where(better, cand, w)
    return w
