"""Piecewise-linear diversity-multiplexing tradeoff curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, InvalidInputError

__all__ = [
    "DmtCurve",
    "classical_curve",
    "secret_no_csit_curve",
    "secret_csit_curve",
    "dmt_classical",
    "secret_dmt_no_csit",
    "secret_dmt_csit",
]


@dataclass(frozen=True)
class DmtCurve:
    """Diversity as a piecewise-linear function through integer kinks ``(l, d(l))``.

    The last kink has ``d = 0`` and sits at ``max_multiplexing``; a degenerate
    curve is the single point ``(0, 0)``.
    """

    kink_points: tuple[tuple[int, int], ...]

    @property
    def max_multiplexing(self) -> float:
        return float(self.kink_points[-1][0])

    def __call__(self, r: float) -> float:
        r = float(r)
        if not np.isfinite(r) or r < 0:
            raise DomainError(f"multiplexing gain must be finite and >= 0, got {r}")
        if r > self.max_multiplexing:
            raise DomainError(
                f"multiplexing gain {r} exceeds the maximum {self.max_multiplexing:g}"
            )
        ls, ds = zip(*self.kink_points)
        return float(np.interp(r, ls, ds))


def _check_counts(**counts):
    for name, v in counts.items():
        if isinstance(v, bool) or int(v) != v:
            raise InvalidInputError(f"{name} must be an integer, got {v!r}")
    if counts.get("m", 1) < 1 or counts.get("n", 1) < 1 or counts.get("k", 0) < 0:
        raise InvalidInputError(f"invalid antenna counts {counts}")


def _kinks(rows: int, cols: int) -> tuple[tuple[int, int], ...]:
    """Kinks of the tradeoff of a rows x cols channel, ``(l, (rows-l)(cols-l))``."""
    top = min(rows, cols)
    return tuple((l, (rows - l) * (cols - l)) for l in range(top + 1))


def classical_curve(m: int, n: int) -> DmtCurve:
    _check_counts(m=m, n=n)
    return DmtCurve(_kinks(int(m), int(n)))


def secret_no_csit_curve(m: int, n: int, k: int) -> DmtCurve:
    """Isotropic codebook without CSIT: an (m-k) x (n-k) channel, or (0, 0) if ``k >= min(m, n)``."""
    _check_counts(m=m, n=n, k=k)
    m, n, k = int(m), int(n), int(k)
    if k >= min(m, n):
        return DmtCurve(((0, 0),))
    return DmtCurve(_kinks(m - k, n - k))


def secret_csit_curve(m: int, n: int, k: int) -> DmtCurve:
    """Full CSI: kinks ``(l, (m-k-l)(n-l))`` truncated at their first zero.

    That is the tradeoff of an (m-k) x n channel, or the point (0, 0) if ``k >= m``.
    """
    _check_counts(m=m, n=n, k=k)
    m, n, k = int(m), int(n), int(k)
    if k >= m:
        return DmtCurve(((0, 0),))
    kinks = []
    for l in range(m - k + 1):
        d = (m - k - l) * (n - l)
        kinks.append((l, d))
        if d == 0:
            break
    return DmtCurve(tuple(kinks))


def dmt_classical(m: int, n: int, r: float) -> float:
    return classical_curve(m, n)(r)


def secret_dmt_no_csit(m: int, n: int, k: int, r_s: float) -> float:
    return secret_no_csit_curve(m, n, k)(r_s)


def secret_dmt_csit(m: int, n: int, k: int, r_s: float) -> float:
    return secret_csit_curve(m, n, k)(r_s)
