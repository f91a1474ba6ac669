"""scikit-learn style wrapper: fit on an SNR grid, predict outage probabilities."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .channel import AntennaConfig
from .events import EVENTS
from .exceptions import FitUnavailableError, InvalidInputError
from .experiment import analytic_values, prediction_curve_name
from .montecarlo import McConfig, WindowPolicy, fit_slope, run_sweep
from .rates import SchemeKind

__all__ = ["SecrecyOutageEstimator"]


def _snr_column(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    X = check_array(X, dtype=float)
    if X.shape[1] != 1:
        raise InvalidInputError(f"expected a single column of SNR values in dB, got {X.shape[1]} columns")
    return X[:, 0]


class SecrecyOutageEstimator(BaseEstimator):
    """Monte Carlo outage curve over an SNR grid, with power-law slope fits.

    ``fit(X)`` takes SNR values in dB (one column, or a 1-d array) as the
    grid to simulate. After fitting, ``diversity_`` holds the fitted
    diversity of ``event`` and ``predict(X)`` evaluates the fitted power law.

    Examples
    --------
    >>> est = SecrecyOutageEstimator(m=2, n=1, k=1, scheme="zero_forcing", trials=2000)
    >>> est.fit([30, 40, 50]).curve_.snr_db.tolist()
    [30.0, 40.0, 50.0]
    """

    def __init__(
        self,
        m=2,
        n=2,
        k=1,
        scheme="isotropic_no_csit",
        plan_kind=None,
        r_s=0.75,
        trials=100_000,
        master_seed=0,
        event="secrecy_rate_outage",
        min_events=100,
        p_window=(1e-5, 1e-1),
        n_jobs=1,
    ):
        self.m = m
        self.n = n
        self.k = k
        self.scheme = scheme
        self.plan_kind = plan_kind
        self.r_s = r_s
        self.trials = trials
        self.master_seed = master_seed
        self.event = event
        self.min_events = min_events
        self.p_window = p_window
        self.n_jobs = n_jobs

    def _config(self, grid) -> McConfig:
        scheme = SchemeKind(self.scheme)
        plan = self.plan_kind
        if plan is None:
            plan = "no_csit" if scheme is SchemeKind.ISOTROPIC_NO_CSIT else "csit_adaptive"
        return McConfig(
            AntennaConfig(self.m, self.n, self.k),
            scheme,
            plan,
            float(self.r_s),
            tuple(grid),
            int(self.trials),
            int(self.master_seed),
            int(self.min_events),
        )

    def fit(self, X, y=None):
        if self.event not in EVENTS:
            raise InvalidInputError(f"unknown event {self.event!r}")
        grid = np.sort(_snr_column(X))
        cfg = self._config(grid)
        self.curve_ = run_sweep(cfg, threads=self.n_jobs)
        window = WindowPolicy(self.p_window[0], self.p_window[1], self.min_events)
        self.fits_ = {}
        self.fit_errors_ = {}
        for event in EVENTS:
            try:
                self.fits_[event] = fit_slope(self.curve_, event, window)
            except FitUnavailableError as exc:
                self.fits_[event] = None
                self.fit_errors_[event] = str(exc)
        fit = self.fits_[self.event]
        self.diversity_ = np.nan if fit is None else fit.slope
        values = analytic_values(self.m, self.n, self.k, self.r_s)
        predicted = values[prediction_curve_name(cfg.scheme)]
        self.predicted_diversity_ = np.nan if predicted is None else predicted
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> np.ndarray:
        """Outage probability of ``event`` from the fitted power law at SNRs ``X`` (dB)."""
        check_is_fitted(self, "curve_")
        fit = self.fits_[self.event]
        if fit is None:
            raise FitUnavailableError(self.fit_errors_[self.event])
        return fit.predict(_snr_column(X))

    def transform(self, X) -> np.ndarray:
        """Simulated ``p_hat`` of all three events at grid points of ``X`` (rows) by event (columns)."""
        check_is_fitted(self, "curve_")
        snr = _snr_column(X)
        grid = self.curve_.snr_db
        idx = np.searchsorted(grid, snr)
        bad = (idx >= grid.size) | (grid[np.minimum(idx, grid.size - 1)] != snr)
        if np.any(bad):
            raise InvalidInputError(f"SNR values not on the fitted grid: {snr[bad].tolist()}")
        return np.column_stack([self.curve_.p_hat(e)[idx] for e in EVENTS])
