import numpy as np
import pytest
from hypothesis import given, strategies as st

from wiretap_dmt.exceptions import InvalidInputError
from wiretap_dmt.linalg import (
    NullSpaceBasis,
    gram,
    gsvd_values,
    hermitian,
    hermitian_eigenvalues,
    log_det_i_plus,
    null_space_basis,
    projection_from_basis,
    sample_gaussian_matrix,
)

from conftest import cn

dims = st.integers(min_value=1, max_value=5)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_sample_zero_rows():
    h = sample_gaussian_matrix(0, 3, np.random.default_rng(1))
    assert h.shape == (0, 3)


def test_sample_deterministic():
    a = sample_gaussian_matrix(2, 2, np.random.default_rng(7))
    b = sample_gaussian_matrix(2, 2, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_sample_unit_power():
    h = sample_gaussian_matrix(1000, 1, np.random.default_rng(3))
    assert abs(np.mean(np.abs(h) ** 2) - 1.0) < 0.1
    big = sample_gaussian_matrix(100_000, 1, np.random.default_rng(4))
    assert np.var(big.real) == pytest.approx(0.5, abs=0.01)
    assert np.var(big.imag) == pytest.approx(0.5, abs=0.01)


def test_sample_negative_size():
    with pytest.raises(InvalidInputError):
        sample_gaussian_matrix(-1, 2, np.random.default_rng(0))


def test_eigenvalues_identity_and_diag():
    assert np.allclose(hermitian_eigenvalues(np.eye(3)), [1, 1, 1])
    assert np.allclose(hermitian_eigenvalues(np.diag([4.0, 1.0])), [1, 4])


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_eigenvalues_match_charpoly_roots(rng, d):
    h = cn(rng, d, d + 1)
    g = gram(h)
    roots = np.sort(np.roots(np.poly(g)).real)
    assert np.allclose(hermitian_eigenvalues(g), roots, atol=1e-8)


@given(d=dims, seed=seeds)
def test_eigen_trace_and_det_identities(d, seed):
    rng = np.random.default_rng(seed)
    g = gram(cn(rng, d, d + 2))
    w = hermitian_eigenvalues(g)
    assert np.all(np.diff(w) >= 0)
    assert np.sum(w) == pytest.approx(np.trace(g).real, rel=1e-9)
    assert np.prod(1 + w) == pytest.approx(np.linalg.det(np.eye(d) + g).real, rel=1e-9)


def test_eigen_reconstruction(rng):
    g = gram(cn(rng, 3, 3))
    w, v = np.linalg.eigh(g)
    assert np.allclose(hermitian_eigenvalues(g), w, atol=1e-12)
    assert np.linalg.norm(v @ np.diag(w) @ hermitian(v) - g) <= 1e-9 * np.linalg.norm(g, 2)


def test_eigen_small_closed_form_matches_lapack(rng):
    stack = gram(np.stack([cn(rng, 2, 3) for _ in range(200)]))
    assert np.allclose(hermitian_eigenvalues(stack), np.linalg.eigvalsh(stack), rtol=1e-12, atol=1e-12)


def test_eigen_rank_one_2x2_no_negative(rng):
    v = cn(rng, 2, 1)
    g = v @ hermitian(v)
    w = hermitian_eigenvalues(g)
    assert w[0] >= 0 and w[0] <= 1e-12 * w[1]


def test_eigen_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        hermitian_eigenvalues(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        hermitian_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        hermitian_eigenvalues(np.array([[np.nan, 0], [0, 1.0]]))


def test_null_space_axis_aligned():
    b = null_space_basis(np.array([[1.0, 0.0]]))
    assert b.nullity == 1
    assert abs(abs(b.basis[1, 0]) - 1) < 1e-12 and abs(b.basis[0, 0]) < 1e-12


def test_null_space_zero_matrix():
    b = null_space_basis(np.zeros((1, 2)))
    assert b.nullity == 2
    assert np.allclose(hermitian(b.basis) @ b.basis, np.eye(2))


@given(rows=st.integers(0, 4), cols=dims, seed=seeds)
def test_null_space_properties(rows, cols, seed):
    h = cn(np.random.default_rng(seed), rows, cols)
    b = null_space_basis(h)
    assert b.nullity == cols - min(rows, cols)
    assert np.linalg.norm(hermitian(b.basis) @ b.basis - np.eye(b.nullity)) <= 1e-10
    if rows:
        assert np.linalg.norm(h @ b.basis) <= 1e-10 * np.linalg.norm(h)


def test_null_space_rank_deficient(rng):
    row = cn(rng, 1, 3)
    h = np.vstack([row, 2 * row])
    assert null_space_basis(h).nullity == 2


def test_projection_examples():
    e2 = NullSpaceBasis(np.array([[0.0], [1.0]], dtype=complex), 1)
    assert np.allclose(projection_from_basis(e2), np.diag([0.0, 1.0]))
    empty = NullSpaceBasis(np.zeros((3, 0), dtype=complex), 0)
    assert np.array_equal(projection_from_basis(empty), np.zeros((3, 3)))


@given(rows=st.integers(0, 3), cols=dims, seed=seeds)
def test_projection_idempotent_hermitian_trace(rows, cols, seed):
    b = null_space_basis(cn(np.random.default_rng(seed), rows, cols))
    p = projection_from_basis(b)
    assert np.linalg.norm(p @ p - p) <= 1e-10
    assert np.array_equal(p, hermitian(p)) or np.linalg.norm(p - hermitian(p)) <= 1e-14
    assert np.trace(p).real == pytest.approx(b.nullity, abs=1e-9)


def test_log_det_examples():
    assert log_det_i_plus(np.zeros((2, 2))) == 0.0
    assert log_det_i_plus(3.0 * np.eye(2)) == pytest.approx(2 * np.log2(4.0))


@given(d=dims, seed=seeds)
def test_log_det_matches_determinant(d, seed):
    g = gram(cn(np.random.default_rng(seed), d, d))
    direct = np.log2(np.linalg.det(np.eye(d) + g).real)
    assert log_det_i_plus(g) == pytest.approx(direct, rel=1e-9, abs=1e-12)


@given(d=dims, seed=seeds)
def test_log_det_monotone(d, seed):
    rng = np.random.default_rng(seed)
    a = gram(cn(rng, d, d))
    b = gram(cn(rng, 1, d))
    assert log_det_i_plus(a + b) >= log_det_i_plus(a) - 1e-12


def test_log_det_rejects_indefinite():
    with pytest.raises(InvalidInputError):
        log_det_i_plus(np.diag([1.0, -0.5]))


def test_gsvd_scalar():
    r = gsvd_values(np.array([[2.0]]), np.array([[1.0]]))
    assert np.allclose(r.sigmas, [2.0]) and r.p == 0


@pytest.mark.parametrize("m,n", [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_gsvd_inverse_oracle(rng, m, n):
    # k = m: generalized singular values are the singular values of H_D H_E^-1
    for _ in range(5):
        h_d, h_e = cn(rng, n, m), cn(rng, m, m)
        r = gsvd_values(h_d, h_e)
        expect = np.linalg.svd(h_d @ np.linalg.inv(h_e), compute_uv=False)
        expect = np.sort(np.concatenate([expect, np.zeros(max(0, m - n))]))[::-1]
        assert np.allclose(r.sigmas, expect[: r.sigmas.size], atol=1e-8, rtol=1e-8)
        assert r.p == 0


@pytest.mark.parametrize(
    "mnk,p,count",
    [((2, 2, 1), 1, 1), ((2, 2, 2), 0, 2), ((3, 4, 2), 1, 2), ((2, 1, 1), 0, 1)],
)
def test_gsvd_generic_dimension_count(rng, mnk, p, count):
    m, n, k = mnk
    for _ in range(10):
        r = gsvd_values(cn(rng, n, m), cn(rng, k, m))
        assert r.p == p
        assert r.sigmas.size == count == min(m, n) - p
        assert np.all(r.sigmas >= 0) and np.all(np.isfinite(r.sigmas))
        assert np.all(np.diff(r.sigmas) <= 0)


@pytest.mark.parametrize("mnk", [(3, 1, 2), (4, 2, 3), (3, 2, 2), (4, 3, 1)])
def test_gsvd_count_equals_rank_minus_infinite(rng, mnk):
    m, n, k = mnk
    h_d, h_e = cn(rng, n, m), cn(rng, k, m)
    r = gsvd_values(h_d, h_e)
    rank = np.linalg.matrix_rank(np.vstack([h_d, h_e]))
    infinite = rank - np.linalg.matrix_rank(h_e)
    assert r.sigmas.size == rank - infinite


def test_gsvd_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        gsvd_values(np.ones((1, 2)), np.ones((1, 3)))
