"""Reproducible parallel Monte Carlo estimation of outage events over an SNR grid.

Every trial owns a random substream addressed by ``(master_seed, snr_index,
trial_index)``: the pair ``(master_seed, snr_index)`` keys a Philox generator
and the trial index selects a fixed window of its counter space. A trial's
channel draw therefore never depends on how trials are grouped into blocks or
spread across threads, and counts are reduced by integer addition.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .channel import AntennaConfig, ChannelRealization, SnrPoint
from .events import EVENTS, PlanKind, build_plan, classify
from .exceptions import ConfigError, FitUnavailableError, InvalidInputError
from .rates import SchemeKind, check_scheme, scheme_rates

__all__ = [
    "McConfig",
    "OutageEstimate",
    "OutageCurve",
    "WindowPolicy",
    "SlopeFit",
    "substream_key",
    "words_per_trial",
    "sample_channel_block",
    "wilson_interval",
    "run_sweep",
    "fit_power_law",
    "fit_slope",
    "resolve_threads",
]

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1 << 15
_TWO_PI = 2.0 * np.pi
_INV_2_53 = 1.0 / 9007199254740992.0


@dataclass(frozen=True)
class McConfig:
    antennas: AntennaConfig
    scheme: SchemeKind
    plan_kind: PlanKind
    r_s: float
    snr_grid_db: tuple[float, ...]
    trials: int
    master_seed: int = 0
    min_events: int = 100

    def __post_init__(self):
        object.__setattr__(self, "scheme", SchemeKind(self.scheme))
        object.__setattr__(self, "plan_kind", PlanKind(self.plan_kind))
        grid = tuple(float(x) for x in self.snr_grid_db)
        object.__setattr__(self, "snr_grid_db", grid)
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        object.__setattr__(self, "trials", int(self.trials))
        if not grid:
            raise ConfigError("SNR grid is empty")
        if any(not math.isfinite(x) for x in grid):
            raise ConfigError("SNR grid has non-finite values")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("SNR grid must be strictly increasing")
        if not (0 <= int(self.master_seed) < 2**64):
            raise ConfigError("master seed must be an unsigned 64-bit integer")
        if self.r_s < 0 or not math.isfinite(self.r_s):
            raise ConfigError(f"r_s must be finite and >= 0, got {self.r_s}")
        if self.min_events < 1:
            raise ConfigError("min_events must be >= 1")
        try:
            check_scheme(self.scheme, self.antennas)
        except InvalidInputError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class OutageEstimate:
    snr_db: float
    trials: int
    counts: dict
    p_hat: dict
    ci_low: dict
    ci_high: dict


@dataclass(frozen=True)
class OutageCurve:
    estimates: tuple[OutageEstimate, ...]
    config: McConfig

    @property
    def snr_db(self) -> np.ndarray:
        return np.array([e.snr_db for e in self.estimates])

    def p_hat(self, event: str) -> np.ndarray:
        return np.array([e.p_hat[event] for e in self.estimates])

    def counts(self, event: str) -> np.ndarray:
        return np.array([e.counts[event] for e in self.estimates])


@dataclass(frozen=True)
class WindowPolicy:
    """Which grid points enter a slope fit."""

    p_min: float = 1e-5
    p_max: float = 1e-1
    min_events: int = 100


@dataclass(frozen=True)
class SlopeFit:
    """Diversity estimate: minus the slope of log10 p against log10 snr."""

    slope: float
    stderr: float
    points_used: int
    window: tuple[float, float]
    intercept: float = 0.0
    used_snr_db: tuple[float, ...] = field(default=())

    def predict(self, snr_db) -> np.ndarray:
        x = np.asarray(snr_db, dtype=float) / 10.0
        return 10.0 ** (self.intercept - self.slope * x)


def substream_key(master_seed: int, snr_index: int) -> np.ndarray:
    """128-bit Philox key for one SNR point of one experiment."""
    seq = np.random.SeedSequence([int(master_seed), int(snr_index)])
    return seq.generate_state(2, dtype=np.uint64)


def words_per_trial(cfg: AntennaConfig) -> int:
    """64-bit words each trial consumes: two per complex entry, padded to a Philox block."""
    need = 2 * (cfg.n + cfg.k) * cfg.m
    return 4 * ((need + 3) // 4)


def _trial_words(key: np.ndarray, start: int, count: int, width: int) -> np.ndarray:
    counter = np.zeros(4, dtype=np.uint64)
    counter[0] = np.uint64(start * (width // 4))
    gen = np.random.Philox(key=key, counter=counter)
    return gen.random_raw(count * width).reshape(count, width)


def sample_channel_block(
    cfg: AntennaConfig, master_seed: int, snr_index: int, start: int, count: int
) -> ChannelRealization:
    """Channel draws for trials ``start .. start + count - 1`` at one SNR index.

    Each complex entry is built from two uniforms by the Box-Muller map
    ``sqrt(-ln u1) * exp(2 pi i u2)``, which is exactly CN(0, 1).
    """
    width = words_per_trial(cfg)
    words = _trial_words(substream_key(master_seed, snr_index), start, count, width)
    n_entries = (cfg.n + cfg.k) * cfg.m
    pairs = words[:, : 2 * n_entries].reshape(count, n_entries, 2)
    u = ((pairs >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53
    z = np.sqrt(-np.log(u[..., 0])) * np.exp(1j * _TWO_PI * u[..., 1])
    h_d = z[:, : cfg.n * cfg.m].reshape(count, cfg.n, cfg.m)
    h_e = z[:, cfg.n * cfg.m :].reshape(count, cfg.k, cfg.m)
    return ChannelRealization(h_d, h_e)


def wilson_interval(count: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Zero-event points get the one-sided rule-of-three bound ``(0, 3 / trials)``.
    """
    if trials <= 0:
        raise InvalidInputError("trials must be positive")
    if count == 0:
        return 0.0, min(1.0, 3.0 / trials)
    z = float(norm.ppf(0.5 + confidence / 2.0))
    p = count / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = z / denom * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    return max(0.0, min(p, center - half)), min(1.0, max(p, center + half))


def resolve_threads(threads: int | None) -> int:
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return int(threads)


def _count_block(cfg: McConfig, snr_index: int, start: int, count: int) -> np.ndarray:
    snr = SnrPoint.from_db(cfg.snr_grid_db[snr_index])
    ch = sample_channel_block(cfg.antennas, cfg.master_seed, snr_index, start, count)
    rates = scheme_rates(cfg.scheme, ch, snr)
    plan = build_plan(cfg.plan_kind, ch, cfg.r_s, snr, cfg.scheme, rates=rates)
    outcome = classify(ch, plan, cfg.scheme, snr, rates=rates)
    return np.array([int(np.count_nonzero(getattr(outcome, e))) for e in EVENTS], dtype=np.int64)


def run_sweep(
    cfg: McConfig, threads: int | None = 1, block_size: int = BLOCK_SIZE, progress=None
) -> OutageCurve:
    """Estimate all three event probabilities at every grid SNR.

    ``progress``, if given, is called as ``progress(done_blocks, total_blocks)``.
    The result is identical for any ``threads`` and ``block_size``.
    """
    if block_size < 1:
        raise InvalidInputError("block_size must be positive")
    tasks = [
        (i, start, min(block_size, cfg.trials - start))
        for i in range(len(cfg.snr_grid_db))
        for start in range(0, cfg.trials, block_size)
    ]
    totals = np.zeros((len(cfg.snr_grid_db), len(EVENTS)), dtype=np.int64)
    workers = resolve_threads(threads)

    def work(task):
        return task[0], _count_block(cfg, *task)

    if workers == 1:
        results = map(work, tasks)
        pool = None
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        results = pool.map(work, tasks)
    try:
        for done, (i, counts) in enumerate(results, 1):
            totals[i] += counts
            if progress is not None:
                progress(done, len(tasks))
    finally:
        if pool is not None:
            pool.shutdown()

    estimates = []
    for i, snr_db in enumerate(cfg.snr_grid_db):
        counts, p_hat, lo, hi = {}, {}, {}, {}
        for j, event in enumerate(EVENTS):
            c = int(totals[i, j])
            counts[event] = c
            p_hat[event] = c / cfg.trials
            lo[event], hi[event] = wilson_interval(c, cfg.trials)
        estimates.append(OutageEstimate(snr_db, cfg.trials, counts, p_hat, lo, hi))
    logger.debug("sweep finished: %d blocks", len(tasks))
    return OutageCurve(tuple(estimates), cfg)


def fit_power_law(snr_db, p_hat, counts, trials, window: WindowPolicy = WindowPolicy()) -> SlopeFit:
    """Weighted least squares of ``log10 p`` on ``log10 snr`` over qualifying points.

    Weights are the inverse delta-method variance of ``log10 p_hat``,
    ``(1 - p) / (trials * p * ln(10)^2)``. Raises
    :class:`FitUnavailableError` listing why points were rejected when fewer
    than two qualify.
    """
    snr_db = np.asarray(snr_db, dtype=float)
    p_hat = np.asarray(p_hat, dtype=float)
    counts = np.asarray(counts)
    trials = np.broadcast_to(np.asarray(trials, dtype=float), p_hat.shape)
    keep = (p_hat >= window.p_min) & (p_hat <= window.p_max) & (counts >= window.min_events)
    if np.count_nonzero(keep) < 2:
        reasons = []
        for s, p, c in zip(snr_db, p_hat, counts):
            why = []
            if p < window.p_min:
                why.append(f"p_hat {p:.3g} < {window.p_min:g}")
            if p > window.p_max:
                why.append(f"p_hat {p:.3g} > {window.p_max:g}")
            if c < window.min_events:
                why.append(f"{int(c)} events < {window.min_events}")
            if why:
                reasons.append(f"{s:g} dB: " + ", ".join(why))
        raise FitUnavailableError(
            f"only {int(np.count_nonzero(keep))} grid point(s) qualify; "
            + ("; ".join(reasons) or "need at least two")
        )
    x = snr_db[keep] / 10.0
    p = p_hat[keep]
    y = np.log10(p)
    var = np.maximum(1.0 - p, 1.0 / trials[keep]) / (trials[keep] * p) / math.log(10.0) ** 2
    w = 1.0 / var
    xbar = np.sum(w * x) / np.sum(w)
    ybar = np.sum(w * y) / np.sum(w)
    sxx = np.sum(w * (x - xbar) ** 2)
    beta = np.sum(w * (x - xbar) * (y - ybar)) / sxx
    return SlopeFit(
        slope=float(-beta),
        stderr=float(math.sqrt(1.0 / sxx)),
        points_used=int(np.count_nonzero(keep)),
        window=(float(window.p_min), float(window.p_max)),
        intercept=float(ybar - beta * xbar),
        used_snr_db=tuple(float(s) for s in snr_db[keep]),
    )


def fit_slope(curve: OutageCurve, event: str = "secrecy_rate_outage", window: WindowPolicy | None = None) -> SlopeFit:
    """Fit the diversity of one event from a simulated curve."""
    if event not in EVENTS:
        raise InvalidInputError(f"unknown event {event!r}; expected one of {EVENTS}")
    if window is None:
        window = WindowPolicy(min_events=curve.config.min_events)
    return fit_power_law(
        curve.snr_db,
        curve.p_hat(event),
        curve.counts(event),
        [e.trials for e in curve.estimates],
        window,
    )
