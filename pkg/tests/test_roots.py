import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from azpair.polynomial import PolyQ, iterate, parse_poly
from azpair.roots import RootFindingError, aberth_batch, complex_roots, preimage_roots


def expand(clusters):
    coeffs = np.array([1.0 + 0j])
    for c in clusters:
        for _ in range(c.multiplicity):
            coeffs = np.convolve(coeffs, [-c.center, 1.0])
    return coeffs


def test_gaussian_units():
    clusters = complex_roots(parse_poly("x^2 + 1"))
    assert sorted((round(c.center.imag, 12), c.multiplicity) for c in clusters) == [(-1.0, 1), (1.0, 1)]


def test_double_root_is_one_cluster():
    (c,) = complex_roots(parse_poly("x^2 - 2x + 1"))
    assert c.multiplicity == 2
    assert abs(c.center - 1) < 1e-10


def test_biquadratic_roots_by_radicals():
    clusters = complex_roots(parse_poly("x^4 - 4x^2 + 2"))
    expected = sorted(s * math.sqrt(2 + t * math.sqrt(2)) for s in (1, -1) for t in (1, -1))
    got = sorted(c.center.real for c in clusters)
    assert got == pytest.approx(expected, abs=1e-12)
    assert all(abs(c.center.imag) < 1e-12 and c.multiplicity == 1 for c in clusters)


def test_zero_roots_are_exact():
    clusters = complex_roots(parse_poly("x^5 - x^3"))
    zero = [c for c in clusters if c.center == 0]
    assert zero and zero[0].multiplicity == 3 and zero[0].residual_radius == 0


def test_cyclotomic_multiplicities_and_radii():
    # (x^2 + x + 1)^2 (x - 1)^3: true roots known in closed form
    w = cmath.exp(2j * math.pi / 3)
    f = parse_poly("x^2 + x + 1") ** 2 * parse_poly("x - 1") ** 3
    clusters = complex_roots(f)
    assert sorted(c.multiplicity for c in clusters) == [2, 2, 3]
    for c in clusters:
        truth = min((1, w, w.conjugate()), key=lambda r: abs(r - c.center))
        assert abs(c.center - truth) <= max(c.residual_radius, 1e-9)


@given(st.integers(1, 12).flatmap(lambda d: st.lists(st.integers(-20, 20), min_size=d, max_size=d)))
def test_clusters_reproduce_monic_coefficients(low):
    f = PolyQ(low + [1])
    coeffs = expand(complex_roots(f))
    target = np.array([float(c) for c in f.coeffs])
    scale = max(1.0, float(np.max(np.abs(target))))
    assert np.max(np.abs(coeffs - target)) <= 1e-6 * scale


@given(st.lists(st.integers(-30, 30), min_size=3, max_size=9).filter(lambda c: c[-1] != 0))
def test_agrees_with_numpy_oracle(cs):
    f = PolyQ(cs)
    ours = np.array([c.center for c in complex_roots(f) for _ in range(c.multiplicity)])
    theirs = np.roots(np.array(cs[::-1], dtype=float))
    # Multiple roots are ill-conditioned for the eigenvalue oracle; match greedily with a loose cutoff.
    for r in theirs:
        assert np.min(np.abs(ours - r)) < 1e-4 * max(1, abs(r))


def test_nonconvergence_carries_best_iterate():
    f = iterate(parse_poly("x^2 + 1/3"), 4)
    with pytest.raises(RootFindingError) as info:
        complex_roots(f, max_iter=1)
    assert len(info.value.best) == 16 and len(info.value.residuals) == 16


def test_seeded_start_is_reproducible():
    f = parse_poly("x^7 - 3x^2 + 1")
    assert complex_roots(f, seed=3) == complex_roots(f, seed=3)


def test_batch_solver_matches_numpy():
    rng = np.random.default_rng(1)
    rows = rng.normal(size=(200, 5)) + 1j * rng.normal(size=(200, 5))
    roots = aberth_batch(rows, rng=np.random.default_rng(0))
    for row, rs in zip(rows, roots):
        ref = np.roots(row[::-1])
        for r in ref:
            assert np.min(np.abs(rs - r)) < 1e-8 * max(1, abs(r))


def test_batch_solver_handles_double_roots():
    rows = np.array([[1, -2, 1], [0, 0, 1]], dtype=complex)
    roots = aberth_batch(rows)
    assert np.allclose(roots[0], [1, 1], atol=1e-7)
    assert np.allclose(roots[1], [0, 0], atol=1e-7)


def test_preimage_tree_solves_iterate():
    phi = parse_poly("x^2 - 2")
    w = preimage_roots(phi, 3, 6, seed=0)
    assert w.size == 64
    y = w.copy()
    for _ in range(6):
        y = y * y - 2
    assert np.max(np.abs(y - 3)) < 1e-6
    # distinct: the iterate is separable here
    gaps = np.abs(w[:, None] - w[None, :]) + np.eye(64)
    assert gaps.min() > 1e-6
