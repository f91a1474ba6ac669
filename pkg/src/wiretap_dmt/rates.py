"""Secrecy-rate and mutual-information evaluators for each transmission scheme.

All evaluators accept a :class:`~wiretap_dmt.channel.ChannelRealization`
holding either one draw or a batch of draws (leading dimensions); scalar
inputs give float outputs, batched inputs give arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import AntennaConfig, ChannelRealization, as_snr_linear
from .exceptions import InvalidInputError, SchemeInapplicableError
from .linalg import (
    RANK_RTOL,
    _clamp_spectrum,
    _cs_pairs,
    _eigvalsh_small,
    gram,
    hermitian,
    log_det_i_plus,
    null_space_basis,
)

__all__ = [
    "SchemeKind",
    "RateBreakdown",
    "check_scheme",
    "mutual_info_gaussian",
    "secrecy_rate_isotropic",
    "intersection_dim",
    "intersection_dim_matrices",
    "intersection_basis",
    "gsvd_log_gain",
    "secrecy_rate_csit_high_snr",
    "zero_forcing_rate",
    "zero_forcing_leakage",
    "artificial_noise_rate",
    "scheme_rates",
]

INTERSECTION_TOL = 1e-8
GSVD_TOL = 1e-10


class SchemeKind(str, enum.Enum):
    ISOTROPIC_NO_CSIT = "isotropic_no_csit"
    CSIT_HIGH_SNR = "csit_high_snr"
    ZERO_FORCING = "zero_forcing"
    ARTIFICIAL_NOISE = "artificial_noise"


@dataclass(frozen=True)
class RateBreakdown:
    """Mutual information at destination and eavesdropper, and the secrecy rate (bits)."""

    i_main: float | np.ndarray
    i_eve: float | np.ndarray
    r_secret: float | np.ndarray


def check_scheme(scheme: SchemeKind | str, cfg: AntennaConfig) -> SchemeKind:
    """Validate that ``scheme`` is defined for ``cfg`` and return it as an enum."""
    scheme = SchemeKind(scheme)
    if scheme is SchemeKind.ZERO_FORCING and cfg.k >= cfg.m:
        raise SchemeInapplicableError(
            f"zero_forcing requires k < m, got (m, n, k) = {cfg.as_tuple()}"
        )
    if scheme is SchemeKind.ARTIFICIAL_NOISE and cfg.m <= cfg.n:
        raise SchemeInapplicableError(
            f"artificial_noise requires m > n, got (m, n, k) = {cfg.as_tuple()}"
        )
    return scheme


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _logdet_gram(h: np.ndarray, scale) -> np.ndarray:
    """``log2 det(I + scale * h h^H)`` over a stack, via the smaller Gram matrix."""
    rows, cols = h.shape[-2:]
    if rows == 0 or cols == 0:
        return np.zeros(h.shape[:-2])
    g = gram(h) if rows <= cols else hermitian(h) @ h
    w = np.maximum(_clamp_spectrum(_eigvalsh_small(g)), 0.0)
    scale = np.asarray(scale, dtype=float)[..., None]
    return np.sum(np.log2(1.0 + scale * w), axis=-1)


def _logdet_hermitian_psd(g: np.ndarray) -> np.ndarray:
    if g.shape[-1] == 0:
        return np.zeros(g.shape[:-2])
    w = np.maximum(_clamp_spectrum(_eigvalsh_small(g)), 0.0)
    return np.sum(np.log2(1.0 + w), axis=-1)


def _null_projector(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Projector onto ``Null(h)`` and the nullity, for a stack of matrices.

    Draws are assumed to have generic rank ``min(rows, cols)``; the rare
    rank-deficient draw is recomputed individually with an exact rank test.
    """
    batch = h.shape[:-2]
    rows, cols = h.shape[-2:]
    eye = np.eye(cols, dtype=np.complex128)
    if rows == 0:
        return np.broadcast_to(eye, batch + (cols, cols)).copy(), np.full(batch, cols)
    if not batch:
        basis = null_space_basis(h)
        return basis.basis @ hermitian(basis.basis), np.asarray(basis.nullity)
    _, s, vh = np.linalg.svd(h, full_matrices=True)
    g = min(rows, cols)
    cutoff = RANK_RTOL * s[..., 0] * max(rows, cols)
    generic = s[..., g - 1] > cutoff
    null_rows = vh[..., g:, :]
    proj = hermitian(null_rows) @ null_rows
    nullity = np.full(batch, cols - g)
    if not np.all(generic):
        for idx in zip(*np.nonzero(~generic)):
            basis = null_space_basis(h[idx])
            proj[idx] = basis.basis @ hermitian(basis.basis)
            nullity[idx] = basis.nullity
    return proj, nullity


def mutual_info_gaussian(h, q) -> float | np.ndarray:
    """``log2 det(I + h Q h^H)`` for a Gaussian input with covariance ``Q``.

    ``q`` is either a scalar (``Q = q * I``, the isotropic case with power
    ``q`` per antenna) or an explicit covariance matrix.
    """
    h = np.asarray(h, dtype=np.complex128)
    if np.ndim(q) == 0:
        return _out(_logdet_gram(h, float(q)))
    q = np.asarray(q, dtype=np.complex128)
    if q.shape[-1] != h.shape[-1]:
        raise InvalidInputError("covariance size does not match channel columns")
    return log_det_i_plus(h @ q @ hermitian(h))


def secrecy_rate_isotropic(ch: ChannelRealization, snr) -> RateBreakdown:
    """Rates of the isotropic Gaussian codebook ``Q = snr * I_m`` used without CSIT."""
    snr = as_snr_linear(snr)
    i_main = _logdet_gram(ch.h_d, snr)
    i_eve = _logdet_gram(ch.h_e, snr)
    return RateBreakdown(_out(i_main), _out(i_eve), _out(np.maximum(i_main - i_eve, 0.0)))


def _intersection_cosines(h_d: np.ndarray, h_e: np.ndarray, p_null_e=None) -> np.ndarray:
    p_null_d, _ = _null_projector(h_d)
    eye = np.eye(h_d.shape[-1], dtype=np.complex128)
    p_row_d = eye - p_null_d
    if p_null_e is None:
        p_null_e, _ = _null_projector(h_e)
    return np.linalg.svd(p_row_d @ p_null_e, compute_uv=False)


def intersection_dim(ch: ChannelRealization, tol: float = INTERSECTION_TOL):
    """``p = dim(Null(H_D)^perp  cap  Null(H_E))``.

    Counted as the principal-angle cosines between the two subspaces that equal
    one within ``tol``. Generic draws give ``max(0, min(m, n) - k)`` when
    ``k < m`` and 0 otherwise.
    """
    cos = _intersection_cosines(ch.h_d, ch.h_e)
    p = np.count_nonzero(cos >= 1.0 - tol, axis=-1)
    return int(p) if np.ndim(p) == 0 else p


def intersection_dim_matrices(h_d, h_e, tol: float = INTERSECTION_TOL) -> int:
    return intersection_dim(ChannelRealization(h_d, h_e), tol)


def intersection_basis(h_d, h_e, tol: float = INTERSECTION_TOL) -> np.ndarray:
    """Orthonormal basis (m x p) of ``Null(H_D)^perp  cap  Null(H_E)`` for one draw."""
    h_d = np.asarray(h_d, dtype=np.complex128)
    h_e = np.asarray(h_e, dtype=np.complex128)
    p_null_d, _ = _null_projector(h_d)
    p_null_e, _ = _null_projector(h_e)
    prod = (np.eye(h_d.shape[-1]) - p_null_d) @ p_null_e
    _, s, vh = np.linalg.svd(prod)
    return hermitian(vh[s >= 1.0 - tol])


def gsvd_log_gain(ch: ChannelRealization, tol: float = GSVD_TOL):
    """``sum over sigma_j >= 1 of log2 sigma_j^2`` for the pair (H_D, H_E), batched.

    Uses the same CS-decomposition route as
    :func:`wiretap_dmt.linalg.gsvd_values`, vectorized over draws of generic
    rank; rank-deficient draws fall back to the single-matrix routine.
    """
    h_d, h_e = ch.h_d, ch.h_e
    batch = ch.batch_shape
    n, k, m = ch.n, ch.k, ch.m
    if k == 0:
        return _out(np.zeros(batch))
    if not batch:
        cc, ss, _ = _cs_pairs(h_d, h_e, tol)
        keep = ss > tol
        sig = cc[keep] / ss[keep]
        return float(np.sum(2.0 * np.log2(sig[sig >= 1.0])))
    stacked = np.concatenate([h_d, h_e], axis=-2)
    u, sv, _ = np.linalg.svd(stacked, full_matrices=False)
    r0 = min(n + k, m)
    generic = sv[..., r0 - 1] > RANK_RTOL * sv[..., 0] * max(n + k, m)
    q1 = u[..., :n, :r0]
    q2 = u[..., n:, :r0]
    _, v = np.linalg.eigh(hermitian(q1) @ q1)
    c = np.linalg.norm(q1 @ v, axis=-2)
    s = np.linalg.norm(q2 @ v, axis=-2)
    finite = s > tol
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = np.where(finite, c / np.where(finite, s, 1.0), 0.0)
    use = finite & (sigma >= 1.0)
    gain = np.sum(np.where(use, 2.0 * np.log2(np.where(use, sigma, 1.0)), 0.0), axis=-1)
    if not np.all(generic):
        for idx in zip(*np.nonzero(~generic)):
            cc, ss, _ = _cs_pairs(h_d[idx], h_e[idx], tol)
            keep = ss > tol
            sig = cc[keep] / ss[keep]
            gain[idx] = np.sum(2.0 * np.log2(sig[sig >= 1.0]))
    return _out(gain)


def secrecy_rate_csit_high_snr(ch: ChannelRealization, snr):
    """High-SNR secrecy capacity with full CSI, with the vanishing term dropped.

    For ``k < m`` the value is the generalized-singular-value gain plus
    ``log2 det(I_n + (m snr / p~) H_D H_E^perp H_D^H)``, where ``p~`` is the
    intersection dimension, or ``min(m - k, n)`` when that dimension is 0.
    For ``k >= m`` only the SNR-independent gain remains. Clamped at 0.
    """
    snr = as_snr_linear(snr)
    m, n, k = ch.m, ch.n, ch.k
    gain = np.asarray(gsvd_log_gain(ch), dtype=float)
    if k >= m:
        return _out(np.maximum(gain, 0.0))
    proj_e, _ = _null_projector(ch.h_e)
    cos = _intersection_cosines(ch.h_d, ch.h_e, proj_e)
    p = np.count_nonzero(cos >= 1.0 - INTERSECTION_TOL, axis=-1)
    p_eff = np.where(p > 0, p, min(m - k, n))
    grow = _logdet_gram(ch.h_d @ proj_e, m * snr / p_eff)
    return _out(np.maximum(gain + grow, 0.0))


def zero_forcing_rate(ch: ChannelRealization, snr) -> RateBreakdown:
    """Transmit only in ``Null(H_E)`` with covariance ``m snr I / (m - k)`` on it.

    The eavesdropper sees pure noise, so ``i_eve`` is exactly zero.

    Raises
    ------
    SchemeInapplicableError
        If ``k >= m``.
    """
    if ch.k >= ch.m:
        raise SchemeInapplicableError(f"zero_forcing requires k < m, got k={ch.k}, m={ch.m}")
    snr = as_snr_linear(snr)
    proj_e, nullity = _null_projector(ch.h_e)
    i_main = _logdet_gram(ch.h_d @ proj_e, ch.m * snr / nullity)
    zeros = np.zeros(ch.batch_shape)
    return RateBreakdown(_out(i_main), _out(zeros), _out(i_main))


def zero_forcing_leakage(ch: ChannelRealization):
    """Relative leakage ``||H_E A||_F / ||H_E||_F`` of the zero-forcing precoder."""
    proj_e, _ = _null_projector(ch.h_e)
    num = np.linalg.norm(ch.h_e @ proj_e, axis=(-2, -1))
    den = np.linalg.norm(ch.h_e, axis=(-2, -1))
    with np.errstate(invalid="ignore", divide="ignore"):
        return _out(np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0))


def artificial_noise_rate(ch: ChannelRealization, snr) -> RateBreakdown:
    """Message with covariance ``snr I / 2`` plus noise sent in ``Null(H_D)``.

    With ``T`` an orthonormal basis of ``Null(H_D)`` and
    ``K = I_k + snr / (2 (m - n)) H_E T T^H H_E^H``::

        i_main = log2 det(I_n + snr/2 H_D H_D^H)
        i_eve  = log2 det(K + snr/2 H_E H_E^H) - log2 det(K)

    Raises
    ------
    SchemeInapplicableError
        If ``m <= n``.
    """
    m, n = ch.m, ch.n
    if m <= n:
        raise SchemeInapplicableError(f"artificial_noise requires m > n, got m={m}, n={n}")
    snr = as_snr_linear(snr)
    i_main = _logdet_gram(ch.h_d, snr / 2.0)
    if ch.k == 0:
        i_eve = np.zeros(ch.batch_shape)
    else:
        proj_d, _ = _null_projector(ch.h_d)
        het = ch.h_e @ proj_d
        k_minus_i = (snr / (2.0 * (m - n))) * gram(het)
        total = k_minus_i + (snr / 2.0) * gram(ch.h_e)
        i_eve = _logdet_hermitian_psd(total) - _logdet_hermitian_psd(k_minus_i)
    return RateBreakdown(_out(i_main), _out(i_eve), _out(np.maximum(i_main - i_eve, 0.0)))


def scheme_rates(scheme: SchemeKind | str, ch: ChannelRealization, snr) -> RateBreakdown:
    """Dispatch to the evaluator for ``scheme``.

    The high-SNR CSIT proxy only yields a secrecy capacity, so it is reported
    as an equivalent channel with ``i_main = C`` and ``i_eve = 0``.
    """
    scheme = check_scheme(scheme, ch.config)
    if scheme is SchemeKind.ISOTROPIC_NO_CSIT:
        return secrecy_rate_isotropic(ch, snr)
    if scheme is SchemeKind.ZERO_FORCING:
        return zero_forcing_rate(ch, snr)
    if scheme is SchemeKind.ARTIFICIAL_NOISE:
        return artificial_noise_rate(ch, snr)
    cap = secrecy_rate_csit_high_snr(ch, snr)
    return RateBreakdown(cap, _out(np.zeros(ch.batch_shape)), cap)
