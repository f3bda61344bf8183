import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from daepl.errors import DimensionError
from daepl.subspace import (
    EPS,
    compare,
    distance,
    full,
    image,
    preimage,
    sine_angle,
    span,
    zero,
)

E2 = np.array([[0.0, 1.0], [0.0, 0.0]])


def test_span_collinear():
    s = span([np.array([1.0, 0.0]), np.array([2.0, 0.0])])
    assert s.dim == 1
    assert np.allclose(np.abs(s.basis[:, 0]), [1.0, 0.0])


def test_span_empty():
    s = span([], ambient_dim=3)
    assert s.dim == 0 and s.ambient_dim == 3 and s.is_zero


def test_span_empty_without_dimension():
    with pytest.raises(DimensionError):
        span([])


def test_span_orthogonal_pair():
    assert span([np.array([1.0, 1.0]), np.array([1.0, -1.0])]).is_full


def test_basis_is_read_only():
    s = span(np.eye(3)[:, :2])
    with pytest.raises(ValueError):
        s.basis[0, 0] = 5.0


def test_image_examples():
    s = span(np.array([[1.0], [2.0]]))
    assert compare(image(np.eye(2), s), s).relation == "equal"
    r = image(E2, full(2))
    assert compare(r, span([np.array([1.0, 0.0])])).relation == "equal"
    assert image(np.zeros((2, 2)), full(2)).is_zero


def test_image_dimension_mismatch():
    with pytest.raises(DimensionError):
        image(np.eye(3), full(2))


def test_preimage_examples():
    assert preimage(np.array([[2.0, 1.0], [0.0, 3.0]]), full(2)).is_full
    e1 = span([np.array([1.0, 0.0])])
    assert compare(preimage(np.eye(2), e1), e1).relation == "equal"
    # the P2 chain: A^{-1}[E[R^2]] = span e1, then A^{-1}[E[span e1]] = {0}
    iv1 = preimage(np.eye(2), image(E2, full(2)))
    assert compare(iv1, e1).relation == "equal"
    assert preimage(np.eye(2), image(E2, iv1)).is_zero


def test_preimage_brute_force():
    # M maps R^3 into R^2; S = span e1; preimage = {x : (Mx)_2 = 0}
    m = np.array([[1.0, 2.0, 3.0], [1.0, -1.0, 0.0]])
    pre = preimage(m, span([np.array([1.0, 0.0])]))
    assert pre.dim == 2
    assert np.allclose((m @ pre.basis)[1], 0.0, atol=1e-14)
    # dimension cross-check by rank of the constraint row
    assert pre.dim == 3 - np.linalg.matrix_rank(m[1:])


def test_compare_examples():
    s = span(np.array([[1.0], [1.0]]))
    assert compare(s, s).relation == "equal"
    assert compare(zero(2), s).first_in_second
    assert compare(span([np.array([1.0, 0.0])]), span([np.array([0.0, 1.0])])).relation == "incomparable"
    assert compare(s, full(2)).relation == "subset"
    assert compare(full(2), s).relation == "superset"


def test_compare_ambient_mismatch():
    with pytest.raises(DimensionError):
        compare(full(2), full(3))


def test_distance_and_sine():
    e1 = span([np.array([1.0, 0.0])])
    assert distance(e1, np.array([0.0, 1.0])) == pytest.approx(1.0)
    assert sine_angle(e1, np.array([1.0, 1.0])) == pytest.approx(np.sqrt(0.5))
    assert sine_angle(e1, np.zeros(2)) == 0.0


def _orthonormal(s):
    if s.is_zero:
        return True
    g = s.basis.T @ s.basis
    return np.abs(g - np.eye(s.dim)).max() <= 10 * EPS * s.ambient_dim


def _random_map(n, rank, rng):
    if rank == 0:
        return np.zeros((n, n))
    return rng.standard_normal((n, rank)) @ rng.standard_normal((rank, n))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(0, 7), st.integers(0, 7), st.integers(0, 7), st.integers(0, 2**31))
def test_monotone_galois_and_dimensions(n, k1, k2, rank, seed):
    rng = np.random.default_rng(seed)
    k2 = min(k2, n)
    k1 = min(k1, k2)
    rank = min(rank, n)
    m = _random_map(n, rank, rng)
    sv = np.linalg.svd(m, compute_uv=False)
    nz = sv[sv > n * EPS * sv[0]] if sv[0] > 0 else sv[:0]
    kappa = float(nz[0] / nz[-1]) if nz.size else 1.0
    assume(kappa < 1e8)
    # subspace perturbations scale with the conditioning of M on its range
    ctol = 100 * n * EPS * kappa
    s2 = span(rng.standard_normal((n, k2)), ambient_dim=n) if k2 else zero(n)
    s1 = span(s2.basis @ rng.standard_normal((k2, k1)), ambient_dim=n) if k1 else zero(n)
    assert compare(s1, s2).first_in_second
    for s in (s1, s2):
        assert _orthonormal(s)
    i1, i2 = image(m, s1), image(m, s2)
    assert compare(i1, i2, ctol).first_in_second
    assert compare(preimage(m, s1), preimage(m, s2), ctol).first_in_second
    assert compare(s1, preimage(m, image(m, s1)), ctol).first_in_second
    r = np.linalg.matrix_rank(m)
    assert i2.dim <= min(s2.dim, r)
    assert preimage(m, s2).dim >= n - r


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 7), st.integers(0, 2**31))
def test_galois_equality_for_injective_maps(n, k, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) + 3 * n * np.eye(n)
    s = span(rng.standard_normal((n, min(k, n))), ambient_dim=n)
    assert compare(preimage(m, image(m, s)), s).relation == "equal"


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 7), st.integers(0, 2**31))
def test_representation_independence_and_idempotence(n, k, seed):
    rng = np.random.default_rng(seed)
    k = min(k, n)
    s = span(rng.standard_normal((n, k)), ambient_dim=n)
    assert compare(span(s.basis, ambient_dim=n), s).relation == "equal"
    if k:
        other = span(s.basis @ rng.standard_normal((k, k + 2)), ambient_dim=n)
        assert compare(other, s).relation == "equal"
