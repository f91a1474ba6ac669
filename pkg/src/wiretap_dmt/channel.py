"""Antenna configurations, channel draws, SNR points and transmit covariances."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError, SchemeInapplicableError
from .linalg import hermitian, null_space_basis, sample_gaussian_matrix

__all__ = [
    "AntennaConfig",
    "ChannelRealization",
    "SnrPoint",
    "CovarianceKind",
    "CovarianceSpec",
    "as_snr_linear",
    "sample_channel",
    "covariance_matrix",
    "covariance_split",
    "covariance_trace",
]


@dataclass(frozen=True)
class AntennaConfig:
    """Antenna counts of source (m), destination (n) and eavesdropper (k).

    ``k = 0`` models the no-eavesdropper case.
    """

    m: int
    n: int
    k: int

    def __post_init__(self):
        for name in ("m", "n", "k"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise InvalidInputError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.m < 1 or self.n < 1 or self.k < 0:
            raise InvalidInputError(
                f"need m >= 1, n >= 1, k >= 0; got ({self.m}, {self.n}, {self.k})"
            )

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.k)


@dataclass(frozen=True)
class ChannelRealization:
    """Destination channel ``h_d`` (n x m) and eavesdropper channel ``h_e`` (k x m).

    Both arrays may carry the same leading batch dimensions, in which case the
    realization holds a whole block of independent draws.
    """

    h_d: np.ndarray
    h_e: np.ndarray

    def __post_init__(self):
        h_d = np.asarray(self.h_d, dtype=np.complex128)
        h_e = np.asarray(self.h_e, dtype=np.complex128)
        if h_d.ndim < 2 or h_e.ndim < 2:
            raise InvalidInputError("channel matrices must be at least 2-D")
        if h_d.shape[-1] != h_e.shape[-1]:
            raise InvalidInputError(
                f"h_d has {h_d.shape[-1]} columns but h_e has {h_e.shape[-1]}"
            )
        if h_d.shape[:-2] != h_e.shape[:-2]:
            raise InvalidInputError("h_d and h_e batch shapes differ")
        object.__setattr__(self, "h_d", h_d)
        object.__setattr__(self, "h_e", h_e)

    @property
    def m(self) -> int:
        return self.h_d.shape[-1]

    @property
    def n(self) -> int:
        return self.h_d.shape[-2]

    @property
    def k(self) -> int:
        return self.h_e.shape[-2]

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.h_d.shape[:-2]

    @property
    def config(self) -> AntennaConfig:
        return AntennaConfig(self.m, self.n, self.k)

    def __getitem__(self, idx) -> ChannelRealization:
        return ChannelRealization(self.h_d[idx], self.h_e[idx])


@dataclass(frozen=True)
class SnrPoint:
    snr_db: float
    snr_linear: float

    @classmethod
    def from_db(cls, snr_db: float) -> SnrPoint:
        snr_db = float(snr_db)
        return cls(snr_db, 10.0 ** (snr_db / 10.0))

    @classmethod
    def from_linear(cls, snr_linear: float) -> SnrPoint:
        snr_linear = float(snr_linear)
        if not snr_linear > 0:
            raise InvalidInputError("linear SNR must be positive")
        return cls(10.0 * math.log10(snr_linear), snr_linear)


def as_snr_linear(snr) -> float:
    """Accept an :class:`SnrPoint` or a positive linear SNR."""
    if isinstance(snr, SnrPoint):
        return snr.snr_linear
    value = float(snr)
    if not value >= 0 or not math.isfinite(value):
        raise InvalidInputError(f"invalid linear SNR {snr!r}")
    return value


class CovarianceKind(str, enum.Enum):
    ISOTROPIC = "isotropic"
    ZERO_FORCING = "zero_forcing"
    ARTIFICIAL_NOISE = "artificial_noise"
    CSIT_HIGH_SNR = "csit_high_snr"


@dataclass(frozen=True)
class CovarianceSpec:
    """Which transmit covariance to use; every kind is a formula of (channel, SNR)."""

    kind: CovarianceKind

    def __post_init__(self):
        object.__setattr__(self, "kind", CovarianceKind(self.kind))


def sample_channel(cfg: AntennaConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one realization with i.i.d. CN(0, 1) entries in both matrices."""
    h_d = sample_gaussian_matrix(cfg.n, cfg.m, rng)
    h_e = sample_gaussian_matrix(cfg.k, cfg.m, rng)
    return ChannelRealization(h_d, h_e)


def _single(ch: ChannelRealization) -> ChannelRealization:
    if ch.batch_shape:
        raise InvalidInputError("covariances are built for one realization at a time")
    return ch


def _signalling_subspace(ch: ChannelRealization) -> np.ndarray:
    """Orthonormal basis of the subspace the high-SNR CSIT scheme transmits in.

    With ``p > 0`` this is ``Null(H_D)^perp  cap  Null(H_E)``; otherwise it is the
    range of ``H_E^perp H_D^H``, whose dimension is ``min(m - k, n)``.
    """
    from .rates import intersection_basis

    basis = intersection_basis(ch.h_d, ch.h_e)
    if basis.shape[1] > 0:
        return basis
    a = null_space_basis(ch.h_e).basis
    proj_rows = a @ (hermitian(a) @ hermitian(ch.h_d))
    u, s, _ = np.linalg.svd(proj_rows, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return u[:, :0]
    rank = int(np.count_nonzero(s > 1e-12 * s[0] * max(proj_rows.shape)))
    return u[:, :rank]


def covariance_split(
    spec: CovarianceSpec, ch: ChannelRealization, snr
) -> tuple[np.ndarray, np.ndarray]:
    """Return the (message, artificial-noise) parts of the transmit covariance.

    The noise part is zero except for the artificial-noise scheme.

    Raises
    ------
    SchemeInapplicableError
        If the scheme is undefined for the channel's antenna counts.
    """
    ch = _single(ch)
    snr = as_snr_linear(snr)
    m, n, k = ch.m, ch.n, ch.k
    zero = np.zeros((m, m), dtype=np.complex128)
    kind = spec.kind
    if kind is CovarianceKind.ISOTROPIC:
        return snr * np.eye(m, dtype=np.complex128), zero
    if kind is CovarianceKind.ZERO_FORCING:
        if k >= m:
            raise SchemeInapplicableError(f"zero forcing needs k < m, got k={k}, m={m}")
        a = null_space_basis(ch.h_e).basis
        return (m * snr / a.shape[1]) * (a @ hermitian(a)), zero
    if kind is CovarianceKind.ARTIFICIAL_NOISE:
        if m <= n:
            raise SchemeInapplicableError(
                f"artificial noise needs m > n, got m={m}, n={n}"
            )
        t = null_space_basis(ch.h_d).basis
        message = (snr / 2.0) * np.eye(m, dtype=np.complex128)
        noise = (m * snr / (2.0 * t.shape[1])) * (t @ hermitian(t))
        return message, noise
    if kind is CovarianceKind.CSIT_HIGH_SNR:
        if k >= m:
            raise SchemeInapplicableError(
                "the high-SNR CSIT proxy defines no covariance when k >= m"
            )
        basis = _signalling_subspace(ch)
        return (m * snr / basis.shape[1]) * (basis @ hermitian(basis)), zero
    raise SchemeInapplicableError(f"unknown covariance kind {kind!r}")


def covariance_matrix(spec: CovarianceSpec, ch: ChannelRealization, snr) -> np.ndarray:
    message, noise = covariance_split(spec, ch, snr)
    return message + noise


def covariance_trace(spec: CovarianceSpec, ch: ChannelRealization, snr) -> float:
    """Total transmitted power ``Tr(Q)``; equals ``m * snr`` for every kind."""
    message, noise = covariance_split(spec, ch, snr)
    return float(np.trace(message).real + np.trace(noise).real)
