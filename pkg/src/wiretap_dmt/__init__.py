"""Secret diversity-multiplexing tradeoff of MIMO wiretap channels.

Analytic tradeoff curves, Monte Carlo outage estimation with slope fits, and
eigenvalue bounds for complex Wishart matrices.
"""

from .channel import AntennaConfig, ChannelRealization, CovarianceKind, CovarianceSpec, SnrPoint, sample_channel
from .dmt import DmtCurve, dmt_classical, secret_dmt_csit, secret_dmt_no_csit
from .events import EVENTS, PlanKind, RatePlan, build_plan, classify
from .exceptions import (
    ConfigError,
    DomainError,
    FitUnavailableError,
    InvalidInputError,
    SchemeInapplicableError,
    UnsupportedSizeError,
    WiretapError,
)
from .montecarlo import McConfig, OutageCurve, SlopeFit, WindowPolicy, fit_slope, run_sweep
from .rates import SchemeKind, scheme_rates
from .estimator import SecrecyOutageEstimator

__version__ = "0.1.0"

__all__ = [
    "AntennaConfig",
    "ChannelRealization",
    "CovarianceKind",
    "CovarianceSpec",
    "SnrPoint",
    "sample_channel",
    "DmtCurve",
    "dmt_classical",
    "secret_dmt_csit",
    "secret_dmt_no_csit",
    "EVENTS",
    "PlanKind",
    "RatePlan",
    "build_plan",
    "classify",
    "ConfigError",
    "DomainError",
    "FitUnavailableError",
    "InvalidInputError",
    "SchemeInapplicableError",
    "UnsupportedSizeError",
    "WiretapError",
    "McConfig",
    "OutageCurve",
    "SlopeFit",
    "WindowPolicy",
    "fit_slope",
    "run_sweep",
    "SchemeKind",
    "scheme_rates",
    "SecrecyOutageEstimator",
]
