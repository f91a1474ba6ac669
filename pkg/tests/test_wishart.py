import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special, stats

from wiretap_dmt.dmt import secret_no_csit_curve
from wiretap_dmt.exceptions import InvalidInputError, UnsupportedSizeError
from wiretap_dmt.wishart import (
    best_exponent,
    bounds_report,
    check_pdf_bound,
    check_tail_bound,
    density_normalization,
    exponent_constants,
    joint_eigenvalue_density,
    max_eig_pdf_bound,
    normalizer_estimate,
    normalizing_constant,
    sample_largest_eigenvalues,
    tail_bound,
    validate_lower_bound_event,
)


def selberg_constant(m, k):
    # integral over the ordered region: prod_{j<k} (m-k+j)! j!
    return math.prod(math.factorial(m - k + j) * math.factorial(j) for j in range(k))


@pytest.mark.parametrize("m,k", [(m, k) for m in range(1, 5) for k in range(1, m + 1)])
def test_normalizer_matches_closed_form(m, k):
    est = normalizer_estimate(m, k)
    ref = selberg_constant(m, k)
    if est.method == "quadrature":
        assert est.value == pytest.approx(ref, rel=1e-8)
    else:
        assert abs(est.value - ref) <= 3 * est.stderr
        assert est.stderr / ref < 0.02


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_single_eigenvalue_constant_is_factorial(m):
    assert normalizing_constant(m, 1) == pytest.approx(math.factorial(m - 1), rel=1e-10)


@pytest.mark.parametrize("m,k", [(1, 1), (3, 1), (2, 2), (4, 2)])
def test_density_integrates_to_one(m, k):
    assert density_normalization(m, k) == pytest.approx(1.0, abs=1e-3)


def test_density_normalization_rejects_large_k():
    with pytest.raises(UnsupportedSizeError):
        density_normalization(3, 3)


def test_density_vanishes_at_repeated_eigenvalues():
    assert joint_eigenvalue_density([1.5, 1.5], 3, 2) == 0.0
    assert joint_eigenvalue_density([0.5, 1.5], 3, 2) > 0.0


def test_density_matches_direct_formula():
    mu = np.array([0.3, 1.1, 2.4])
    a = 1
    vand = (0.3 - 1.1) ** 2 * (0.3 - 2.4) ** 2 * (1.1 - 2.4) ** 2
    expected = np.prod(mu**a) * vand * math.exp(-mu.sum()) / selberg_constant(4, 3)
    assert joint_eigenvalue_density(mu, 4, 3) == pytest.approx(expected, rel=0.02)


@pytest.mark.parametrize("mu", [[2.0, 1.0], [-0.1, 1.0], [1.0]])
def test_density_input_validation(mu):
    with pytest.raises(InvalidInputError):
        joint_eigenvalue_density(mu, 3, 2)


@pytest.mark.parametrize("m,k", [(0, 0), (2, 3), (7, 1)])
def test_unsupported_sizes(m, k):
    with pytest.raises(UnsupportedSizeError):
        normalizer_estimate(m, k)
    with pytest.raises(UnsupportedSizeError):
        tail_bound(m, k, 1.0)


@pytest.mark.parametrize("m", [1, 2, 4])
def test_pdf_bound_is_gamma_density_for_one_eigenvalue(m):
    x = np.linspace(0.0, 12.0, 25)
    np.testing.assert_allclose(max_eig_pdf_bound(x, m, 1), stats.gamma.pdf(x, m), rtol=1e-9, atol=1e-15)


def test_pdf_bound_at_zero_and_validation():
    assert max_eig_pdf_bound(0.0, 3, 2) == 0.0
    with pytest.raises(InvalidInputError):
        max_eig_pdf_bound(-1.0, 3, 2)


def test_pdf_bound_dominates_histogram():
    rows = check_pdf_bound(3, 2, samples=300_000, seed=11, min_count=300)
    assert len(rows) > 20
    assert all(r["passed"] for r in rows)
    near_two = min(rows, key=lambda r: abs(r["center"] - 2.0))
    assert near_two["bound"] >= near_two["density"]


def test_tail_bound_at_zero_is_integral_of_pdf_bound():
    for m, k in [(2, 1), (3, 2), (4, 2)]:
        s = m - 2 * k + k * k + 1
        expected = math.factorial(m - k) ** (k - 1) * math.factorial(s - 1) / normalizing_constant(m, k)
        assert tail_bound(m, k, 0.0) == pytest.approx(expected, rel=1e-12)
    assert tail_bound(3, 1, 0.0) == pytest.approx(1.0)


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_tail_bound_single_eigenvalue_is_gamma_survival(m):
    c = np.array([0.0, 0.5, 1.0, 3.0, 10.0])
    np.testing.assert_allclose(tail_bound(m, 1, c), special.gammaincc(m, c), rtol=1e-10)


def test_tail_bound_decreasing_and_validated():
    c = np.linspace(0, 20, 41)
    vals = tail_bound(3, 2, c)
    assert np.all(np.diff(vals) < 0)
    with pytest.raises(InvalidInputError):
        tail_bound(3, 2, -0.5)


def test_tail_bound_dominates_sampled_tail():
    mu = sample_largest_eigenvalues(3, 2, 400_000, seed=5)
    rows = check_tail_bound(3, 2, [0.5, 1.0, 2.0, 5.0, 10.0], mu=mu)
    assert all(r["passed"] for r in rows)
    at5 = next(r for r in rows if r["C"] == 5.0)
    assert at5["empirical"] <= at5["bound"]


def test_sampler_single_eigenvalue_distribution():
    mu = sample_largest_eigenvalues(2, 1, 100_000, seed=2)
    res = stats.kstest(mu, stats.gamma(2).cdf)
    assert res.pvalue > 1e-3


def test_sampler_deterministic_and_chunk_invariant():
    a = sample_largest_eigenvalues(3, 2, 5000, seed=8, chunk=5000)
    b = sample_largest_eigenvalues(3, 2, 5000, seed=8, chunk=5000)
    np.testing.assert_array_equal(a, b)


def test_exponent_examples():
    assert exponent_constants(2, 2, 1, 0.75) == [0.25]
    assert exponent_constants(3, 3, 1, 1.0) == [1.0, 1.0]
    assert exponent_constants(3, 3, 3, 0.0) == []
    with pytest.raises(InvalidInputError):
        best_exponent(2, 2, 2, 0.1)
    with pytest.raises(InvalidInputError):
        exponent_constants(2, 2, 1, -1.0)


@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 4))
def test_exponent_at_zero_rate(m, n, k):
    if k >= min(m, n):
        return
    _, c = best_exponent(m, n, k, 0.0)
    assert c == (m - k) * (n - k)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 5), st.floats(0, 1, allow_nan=False))
def test_best_exponent_is_tradeoff_curve(m, n, k, frac):
    if k >= min(m, n):
        return
    curve = secret_no_csit_curve(m, n, k)
    r = frac * curve.max_multiplexing
    _, c = best_exponent(m, n, k, r)
    assert c == pytest.approx(curve(r), abs=1e-9)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_conditioning_event_probability_single_eigenvalue(m):
    # k = 1: P(mu > 1) = exp(-1) sum_{l<m} 1/l!
    p = math.exp(-1) * sum(1 / math.factorial(l) for l in range(m))
    mu = sample_largest_eigenvalues(m, 1, 200_000, seed=12)
    se = math.sqrt(p * (1 - p) / mu.size)
    assert abs(np.mean(mu > 1.0) - p) < 4 * se


def test_lower_bound_event_report():
    grid = (30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0)
    rep = validate_lower_bound_event(2, 2, 1, 0.75, 2.0, grid, 200_000, seed=1)
    assert not rep.insufficient
    assert all(rep.bound_holds)
    p_event = 3 * math.exp(-2)
    assert rep.p_event == pytest.approx(p_event, abs=0.01)
    assert rep.predicted == pytest.approx(0.25)
    assert rep.conditioned_slope == pytest.approx(0.25, abs=0.15)
    assert rep.slope_ok
    for p, pc in zip(rep.p_outage, rep.p_outage_given_event):
        assert pc * rep.p_event <= p + 1e-12


def test_lower_bound_event_insufficient():
    rep = validate_lower_bound_event(2, 2, 1, 0.75, 40.0, (30.0, 40.0), 10_000, seed=1)
    assert rep.insufficient
    assert rep.conditioned_slope is None
    assert rep.notes


def test_lower_bound_event_validation():
    with pytest.raises(InvalidInputError):
        validate_lower_bound_event(2, 2, 1, 0.75, 1.0, (30.0,), 100)
    with pytest.raises(InvalidInputError):
        validate_lower_bound_event(2, 2, 0, 0.75, 2.0, (30.0,), 100)


def test_bounds_report_small():
    rep = bounds_report(2, 2, 1, 0.75, samples=50_000, seed=3)
    names = {c["name"] for c in rep["checks"]}
    assert {"exponent_matches_curve", "density_normalization", "tail_bound", "pdf_bound"} <= names
    assert rep["all_passed"]
    assert rep["best_exponent"] == {"index": 0, "value": 0.25}
