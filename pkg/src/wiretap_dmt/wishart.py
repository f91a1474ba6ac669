"""Ordered eigenvalues of complex Wishart matrices: densities, bounds, validation.

The eavesdropper Gram matrix ``H_E H_E^H`` (``H_E`` is k x m, ``k <= m``) has
ordered eigenvalues ``mu_1 <= ... <= mu_k`` with joint density proportional to
``prod mu_i^(m-k) prod_{i<j} (mu_i - mu_j)^2 exp(-sum mu_i)``. This module
bounds the density and tail of the largest eigenvalue and checks the bounds
against sampled spectra.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .dmt import secret_no_csit_curve
from .exceptions import FitUnavailableError, InvalidInputError, UnsupportedSizeError
from .linalg import gram
from .montecarlo import WindowPolicy, fit_power_law, sample_channel_block
from .channel import AntennaConfig
from .rates import secrecy_rate_isotropic
from .events import target_secrecy_rate

__all__ = [
    "BoundParams",
    "NormalizerEstimate",
    "exponent_constants",
    "best_exponent",
    "bound_params",
    "joint_eigenvalue_density",
    "normalizing_constant",
    "normalizer_estimate",
    "density_normalization",
    "max_eig_pdf_bound",
    "tail_bound",
    "sample_largest_eigenvalues",
    "check_tail_bound",
    "check_pdf_bound",
    "LowerBoundReport",
    "validate_lower_bound_event",
    "bounds_report",
]

MAX_ANTENNAS = 6
MC_NORMALIZER_SAMPLES = 1_000_000
MC_NORMALIZER_SEED = 20100401
SIGMA_ALLOWANCE = 3.0


@dataclass(frozen=True)
class BoundParams:
    m: int
    k: int
    r_s: float
    c_list: tuple[float, ...]
    normalizer: float


@dataclass(frozen=True)
class NormalizerEstimate:
    value: float
    stderr: float
    method: str


def _check_sizes(m: int, k: int) -> None:
    if not (1 <= k <= m <= MAX_ANTENNAS):
        raise UnsupportedSizeError(
            f"need 1 <= k <= m <= {MAX_ANTENNAS}, got m={m}, k={k}"
        )


def exponent_constants(m: int, n: int, k: int, r_s: float) -> list[float]:
    """``c_i = -(m + n - 2k - 2i - 1) r_s + (m - k)(n - k) - i(i + 1)``.

    One constant per ``i = 0 .. min(m, n) - k - 1``; empty when ``k >= min(m, n)``.
    Each ``c_i`` is the line through segment ``i`` of the (m-k) x (n-k)
    tradeoff curve.
    """
    if r_s < 0:
        raise InvalidInputError("r_s must be >= 0")
    top = min(m, n) - k
    return [
        -(m + n - 2 * k - 2 * i - 1) * r_s + (m - k) * (n - k) - i * (i + 1)
        for i in range(max(0, top))
    ]


def best_exponent(m: int, n: int, k: int, r_s: float) -> tuple[int, float]:
    """Index and value of the largest ``c_i`` at ``r_s``.

    The tradeoff curve is convex, so the largest supporting line equals the
    curve itself wherever ``r_s`` is in its domain.
    """
    cs = exponent_constants(m, n, k, r_s)
    if not cs:
        raise InvalidInputError(f"no exponent constants when k >= min(m, n): {(m, n, k)}")
    i = int(np.argmax(cs))
    return i, cs[i]


def _density_unnormalized(mu, m: int, k: int) -> float:
    mu = np.asarray(mu, dtype=float)
    val = np.prod(mu ** (m - k)) * math.exp(-float(np.sum(mu)))
    for i in range(k):
        for j in range(i + 1, k):
            val *= (mu[i] - mu[j]) ** 2
    return float(val)


def _quad_normalizer(m: int, k: int) -> NormalizerEstimate:
    a = m - k
    if k == 1:
        val, err = integrate.quad(lambda x: x**a * math.exp(-x), 0, np.inf, epsabs=0, epsrel=1e-12)
        return NormalizerEstimate(val, err, "quadrature")
    val, err = integrate.dblquad(
        lambda x1, x2: (x1 * x2) ** a * (x2 - x1) ** 2 * math.exp(-x1 - x2),
        0,
        np.inf,
        0,
        lambda x2: x2,
        epsabs=0,
        epsrel=1e-11,
    )
    return NormalizerEstimate(val, err, "quadrature")


def _mc_normalizer(m: int, k: int, samples: int, seed: int) -> NormalizerEstimate:
    """Importance sampling on the unordered orthant with i.i.d. Gamma(m-k+1, theta) proposals.

    The widened scale ``theta = 1 + k/2`` covers the spread of the eigenvalues;
    with ``theta = 1`` the Vandermonde weight has a heavy tail for k >= 4.
    """
    a = m - k
    theta = 1.0 + k / 2.0
    rng = np.random.Generator(np.random.Philox(seed))
    x = rng.gamma(a + 1, scale=theta, size=(samples, k))
    w = theta ** (k * (a + 1)) * np.exp(-x.sum(axis=1) * (1.0 - 1.0 / theta))
    for i in range(k):
        for j in range(i + 1, k):
            w *= (x[:, i] - x[:, j]) ** 2
    scale = math.factorial(a) ** k / math.factorial(k)
    return NormalizerEstimate(
        float(scale * w.mean()), float(scale * w.std(ddof=1) / math.sqrt(samples)), "monte_carlo"
    )


@functools.lru_cache(maxsize=None)
def normalizer_estimate(m: int, k: int) -> NormalizerEstimate:
    """Normalizing constant ``K_{m,k}`` of the ordered joint density, with its error.

    Quadrature on the ordered simplex for ``k <= 2``; importance-sampled Monte
    Carlo (fixed seed, cached) for ``k >= 3``.
    """
    _check_sizes(m, k)
    if k <= 2:
        return _quad_normalizer(m, k)
    return _mc_normalizer(m, k, MC_NORMALIZER_SAMPLES, MC_NORMALIZER_SEED + 100 * m + k)


def normalizing_constant(m: int, k: int) -> float:
    return normalizer_estimate(m, k).value


def bound_params(m: int, n: int, k: int, r_s: float) -> BoundParams:
    return BoundParams(m, k, r_s, tuple(exponent_constants(m, n, k, r_s)), normalizing_constant(m, k))


def joint_eigenvalue_density(mu, m: int, k: int) -> float:
    """Joint density of the ordered eigenvalues at ``mu`` (ascending, length k)."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (k,):
        raise InvalidInputError(f"expected {k} eigenvalues, got shape {mu.shape}")
    if np.any(mu < 0) or np.any(np.diff(mu) < 0):
        raise InvalidInputError("eigenvalues must be nonnegative and ascending")
    return _density_unnormalized(mu, m, k) / normalizing_constant(m, k)


def density_normalization(m: int, k: int) -> float:
    """Integral of the joint density, computed over the unordered orthant divided by ``k!``.

    This integrates a different region than the ordered-simplex quadrature
    that fixes ``K``, so a value near 1 cross-checks the constant. Only
    ``k <= 2`` is supported.
    """
    _check_sizes(m, k)
    a = m - k
    norm_k = normalizing_constant(m, k)
    if k == 1:
        val, _ = integrate.quad(lambda x: x**a * math.exp(-x), 0, np.inf, epsabs=0, epsrel=1e-12)
        return val / norm_k
    if k == 2:
        # split at the diagonal so each piece has a smooth integrand
        def f(x1, x2):
            return (x1 * x2) ** a * (x2 - x1) ** 2 * math.exp(-x1 - x2)

        lower, _ = integrate.dblquad(f, 0, np.inf, 0, lambda x2: x2, epsabs=0, epsrel=1e-11)
        upper, _ = integrate.dblquad(f, 0, np.inf, lambda x2: x2, np.inf, epsabs=0, epsrel=1e-11)
        return (lower + upper) / 2.0 / norm_k
    raise UnsupportedSizeError("quadrature normalization check supports k <= 2 only")


def max_eig_pdf_bound(mu_k, m: int, k: int):
    """Upper bound on the density of the largest eigenvalue.

    ``K^-1 mu^(m-k+k(k-1)) exp(-mu) ((m-k)!)^(k-1)``; tight for ``k = 1``.
    """
    _check_sizes(m, k)
    mu = np.asarray(mu_k, dtype=float)
    if np.any(mu < 0):
        raise InvalidInputError("mu_k must be >= 0")
    power = m - k + k * (k - 1)
    val = mu**power * np.exp(-mu) * math.factorial(m - k) ** (k - 1) / normalizing_constant(m, k)
    return float(val) if val.ndim == 0 else val


def tail_bound(m: int, k: int, c) -> float | np.ndarray:
    """Upper bound on ``P(mu_k > C)`` from integrating :func:`max_eig_pdf_bound`.

    ``K^-1 ((m-k)!)^(k-1) Gamma(s, C)`` with integer shape ``s = m - 2k + k^2 + 1``,
    using ``Gamma(s, C) = (s-1)! exp(-C) sum_{l<s} C^l / l!``.
    """
    _check_sizes(m, k)
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise InvalidInputError("C must be >= 0")
    s = m - 2 * k + k * k + 1
    series = np.zeros_like(c)
    term = np.ones_like(c)
    for l in range(s):
        if l:
            term = term * c / l
        series = series + term
    upper_gamma = math.factorial(s - 1) * np.exp(-c) * series
    val = math.factorial(m - k) ** (k - 1) * upper_gamma / normalizing_constant(m, k)
    return float(val) if val.ndim == 0 else val


def sample_largest_eigenvalues(m: int, k: int, samples: int, seed: int = 0, chunk: int = 200_000) -> np.ndarray:
    """Largest eigenvalue of ``H H^H`` for ``samples`` i.i.d. k x m CN(0, 1) matrices."""
    _check_sizes(m, k)
    rng = np.random.Generator(np.random.Philox(seed))
    out = np.empty(samples)
    for start in range(0, samples, chunk):
        cnt = min(chunk, samples - start)
        h = (rng.standard_normal((cnt, k, m)) + 1j * rng.standard_normal((cnt, k, m))) * math.sqrt(0.5)
        out[start : start + cnt] = np.linalg.eigvalsh(gram(h))[:, -1]
    return out


def check_tail_bound(m: int, k: int, c_grid, samples: int = 1_000_000, seed: int = 0, mu=None) -> list[dict]:
    """Compare empirical ``P(mu_k > C)`` with :func:`tail_bound` on a grid.

    A point passes when the empirical tail does not exceed the bound by more
    than three binomial standard errors (the bound is exact for ``k = 1``).
    """
    if mu is None:
        mu = sample_largest_eigenvalues(m, k, samples, seed)
    n = mu.size
    rows = []
    for c in c_grid:
        cnt = int(np.count_nonzero(mu > c))
        p = cnt / n
        se = math.sqrt(max(p * (1.0 - p), 1.0 / n) / n)
        bound = tail_bound(m, k, c)
        rows.append(
            {
                "C": float(c),
                "empirical": p,
                "stderr": se,
                "bound": bound,
                "margin": bound - p,
                "passed": p - SIGMA_ALLOWANCE * se <= bound,
            }
        )
    return rows


def check_pdf_bound(
    m: int, k: int, samples: int = 1_000_000, seed: int = 0, bins: int = 200, min_count: int = 500, mu=None
) -> list[dict]:
    """Histogram density of ``mu_k`` against :func:`max_eig_pdf_bound` at bin centers.

    Only bins holding at least ``min_count`` samples are compared.
    """
    if mu is None:
        mu = sample_largest_eigenvalues(m, k, samples, seed)
    counts, edges = np.histogram(mu, bins=bins, range=(0.0, float(np.quantile(mu, 0.9999))))
    width = np.diff(edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    n = mu.size
    rows = []
    for cnt, w, x in zip(counts, width, centers):
        if cnt < min_count:
            continue
        dens = cnt / (n * w)
        se = math.sqrt(cnt) / (n * w)
        bound = max_eig_pdf_bound(x, m, k)
        rows.append(
            {
                "center": float(x),
                "density": dens,
                "stderr": se,
                "bound": bound,
                "passed": dens - SIGMA_ALLOWANCE * se <= bound,
            }
        )
    return rows


@dataclass(frozen=True)
class LowerBoundReport:
    """Outcome of the conditioning check behind the outage lower bound."""

    snr_db: tuple[float, ...]
    p_event: float
    event_count: int
    p_outage: tuple[float, ...]
    p_outage_given_event: tuple[float, ...]
    bound_holds: tuple[bool, ...]
    conditioned_slope: float | None
    predicted: float
    slope_ok: bool | None
    insufficient: bool
    notes: list[str] = field(default_factory=list)


def validate_lower_bound_event(
    m: int,
    n: int,
    k: int,
    r_s: float,
    a: float,
    snr_grid_db,
    trials: int,
    seed: int = 0,
    min_events: int = 100,
    window: WindowPolicy = WindowPolicy(p_min=1e-5, p_max=1.0, min_events=100),
) -> LowerBoundReport:
    """Check ``P(outage) >= P(outage | E) P(E)`` for ``E = {all mu_i > a}``.

    One block of isotropic channel draws is evaluated at every grid SNR, so
    ``P(E)`` is the same constant at each point. Also fits the diversity of
    the conditioned outage, which must not exceed the (m-k) x (n-k) tradeoff
    by more than 0.15.
    """
    if a <= 1:
        raise InvalidInputError("the conditioning threshold a must exceed 1")
    if k < 1:
        raise InvalidInputError("the conditioning event needs k >= 1")
    cfg = AntennaConfig(m, n, k)
    ch = sample_channel_block(cfg, seed, 0, 0, trials)
    mu_min = np.linalg.eigvalsh(gram(ch.h_e))[:, 0]
    event = mu_min > a
    n_event = int(np.count_nonzero(event))
    curve = secret_no_csit_curve(m, n, k)
    predicted = curve(r_s) if r_s <= curve.max_multiplexing else 0.0
    notes = []
    grid = tuple(float(x) for x in snr_grid_db)
    if n_event < min_events:
        notes.append(f"only {n_event} draws satisfy the conditioning event (< {min_events})")
        return LowerBoundReport(grid, n_event / trials, n_event, (), (), (), None, predicted, None, True, notes)
    p_out, p_cond, holds, cond_counts = [], [], [], []
    for snr_db in grid:
        snr = 10.0 ** (snr_db / 10.0)
        rates = secrecy_rate_isotropic(ch, snr)
        outage = (rates.i_main - rates.i_eve) < target_secrecy_rate(r_s, snr)
        n_out = int(np.count_nonzero(outage))
        n_joint = int(np.count_nonzero(outage & event))
        p_out.append(n_out / trials)
        p_cond.append(n_joint / n_event)
        cond_counts.append(n_joint)
        # on shared draws P(out | E) P(E) is exactly joint / trials
        holds.append(n_joint <= n_out)
    slope, slope_ok = None, None
    try:
        fit = fit_power_law(grid, p_cond, cond_counts, n_event, window)
        slope = fit.slope
        slope_ok = slope <= predicted + 0.15
    except FitUnavailableError as exc:
        notes.append(f"conditioned slope unavailable: {exc}")
    return LowerBoundReport(
        grid, n_event / trials, n_event, tuple(p_out), tuple(p_cond), tuple(holds),
        slope, predicted, slope_ok, False, notes,
    )


def bounds_report(
    m: int,
    n: int,
    k: int,
    r_s: float,
    samples: int = 1_000_000,
    seed: int = 0,
    a: float = 2.0,
    c_grid=(0.5, 1.0, 2.0, 5.0, 10.0),
    snr_grid_db=(30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0),
) -> dict:
    """Run every bound validation for one configuration.

    ``checks`` lists named verdicts; ``passed`` is ``None`` when a check could
    not be evaluated (the reason is attached). ``all_passed`` ignores those.
    """
    _check_sizes(m, k)
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    checks = []
    cs = exponent_constants(m, n, k, r_s)
    report = {"m": m, "n": n, "k": k, "r_s": r_s, "samples": samples, "seed": seed, "c_list": cs}
    est = normalizer_estimate(m, k)
    report["normalizer"] = {"value": est.value, "stderr": est.stderr, "method": est.method}

    if cs:
        i, c = best_exponent(m, n, k, r_s)
        curve = secret_no_csit_curve(m, n, k)
        report["best_exponent"] = {"index": i, "value": c}
        if r_s <= curve.max_multiplexing:
            d = curve(r_s)
            checks.append({"name": "exponent_matches_curve", "passed": math.isclose(c, d, rel_tol=0, abs_tol=1e-12),
                           "margin": c - d})
        else:
            checks.append({"name": "exponent_matches_curve", "passed": None,
                           "reason": "r_s beyond the tradeoff curve's domain"})
    if k <= 2:
        total = density_normalization(m, k)
        checks.append({"name": "density_normalization", "passed": abs(total - 1.0) <= 1e-3, "margin": total - 1.0})

    mu = sample_largest_eigenvalues(m, k, samples, seed)
    tail = check_tail_bound(m, k, c_grid, mu=mu)
    report["tail"] = tail
    checks.append({"name": "tail_bound", "passed": all(r["passed"] for r in tail),
                   "margin": min(r["margin"] for r in tail)})
    pdf = check_pdf_bound(m, k, mu=mu, min_count=min(500, max(1, samples // 100)))
    report["pdf_bins_checked"] = len(pdf)
    if pdf:
        checks.append({"name": "pdf_bound", "passed": all(r["passed"] for r in pdf),
                       "margin": min(r["bound"] - r["density"] for r in pdf)})
    else:
        checks.append({"name": "pdf_bound", "passed": None, "reason": "no histogram bin has enough samples"})

    lb = validate_lower_bound_event(m, n, k, r_s, a, snr_grid_db, samples, seed=seed + 1)
    report["lower_bound_event"] = {
        "a": a,
        "p_event": lb.p_event,
        "event_count": lb.event_count,
        "insufficient": lb.insufficient,
        "conditioned_slope": lb.conditioned_slope,
        "predicted": lb.predicted,
        "notes": lb.notes,
    }
    if lb.insufficient:
        checks.append({"name": "lower_bound_event", "passed": None, "reason": "; ".join(lb.notes)})
    else:
        checks.append({"name": "outage_dominates_conditioned", "passed": all(lb.bound_holds)})
        if lb.slope_ok is None:
            checks.append({"name": "conditioned_slope", "passed": None, "reason": "; ".join(lb.notes)})
        else:
            checks.append({"name": "conditioned_slope", "passed": lb.slope_ok,
                           "margin": lb.predicted + 0.15 - lb.conditioned_slope})
    report["checks"] = checks
    report["all_passed"] = all(c["passed"] for c in checks if c["passed"] is not None)
    return report
