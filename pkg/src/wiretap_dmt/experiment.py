"""Run one configured outage experiment and assemble its result bundle."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .config import ExperimentConfig
from .dmt import classical_curve, secret_csit_curve, secret_no_csit_curve
from .events import EVENTS
from .exceptions import DomainError, FitUnavailableError
from .montecarlo import OutageCurve, SlopeFit, fit_slope, run_sweep
from .rates import SchemeKind
from .serialize import SCHEMA_VERSION, atomic_write, curve_csv, dump_json, fit_record, format_number

__all__ = ["ResultBundle", "analytic_values", "dmt_table_csv", "prediction_curve_name", "run_experiment", "write_bundle"]


def analytic_values(m: int, n: int, k: int, r: float) -> dict:
    """All three tradeoff curves at ``r``; out-of-domain entries are ``None``."""
    out = {}
    curves = {
        "d_classical": classical_curve(m, n),
        "d_secret_no_csit": secret_no_csit_curve(m, n, k),
        "d_secret_csit": secret_csit_curve(m, n, k),
    }
    for name, curve in curves.items():
        try:
            out[name] = curve(r)
        except DomainError:
            out[name] = None
    return out


def dmt_table_csv(m: int, n: int, k: int, r_grid) -> str:
    """CSV with columns r, d_classical, d_secret_no_csit, d_secret_csit; empty cells out of domain."""
    lines = ["r,d_classical,d_secret_no_csit,d_secret_csit"]
    for r in r_grid:
        vals = analytic_values(m, n, k, r)
        row = [r, vals["d_classical"], vals["d_secret_no_csit"], vals["d_secret_csit"]]
        lines.append(",".join(format_number(v) for v in row))
    return "\n".join(lines) + "\n"


def prediction_curve_name(scheme: SchemeKind) -> str:
    # the isotropic codebook ignores CSI, so its outage follows the no-CSIT curve
    return "d_secret_no_csit" if scheme is SchemeKind.ISOTROPIC_NO_CSIT else "d_secret_csit"


@dataclass(frozen=True)
class ResultBundle:
    config: ExperimentConfig
    curve: OutageCurve
    fits: dict
    summary: dict

    @property
    def csv(self) -> str:
        return curve_csv(self.curve)

    @property
    def json(self) -> str:
        return dump_json(self.summary)


def run_experiment(cfg: ExperimentConfig, threads: int | None = None, progress=None) -> ResultBundle:
    curve = run_sweep(cfg.mc_config(), threads=cfg.threads if threads is None else threads, progress=progress)
    fits: dict[str, SlopeFit | None] = {}
    fit_json = {}
    for event in EVENTS:
        try:
            fits[event] = fit_slope(curve, event, cfg.window)
            fit_json[event] = fit_record(fits[event])
        except FitUnavailableError as exc:
            fits[event] = None
            fit_json[event] = fit_record(None, str(exc))

    analytic = analytic_values(cfg.m, cfg.n, cfg.k, cfg.r_s)
    curve_name = prediction_curve_name(cfg.scheme)
    predicted = analytic[curve_name]
    fit = fits[cfg.event]
    comparison = {"event": cfg.event, "curve": curve_name, "predicted": predicted, "tolerance": cfg.tolerance}
    if fit is None:
        comparison.update(abs_error=None, within_tolerance=None, reason="slope fit unavailable")
    elif predicted is None:
        comparison.update(abs_error=None, within_tolerance=None, reason="r_s outside the curve's domain")
    else:
        err = abs(fit.slope - predicted)
        comparison.update(slope=fit.slope, stderr=fit.stderr, abs_error=err, within_tolerance=err <= cfg.tolerance)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.as_dict(),
        "analytic": analytic,
        "fits": fit_json,
        "comparison": comparison,
    }
    return ResultBundle(cfg, curve, fits, summary)


def write_bundle(bundle: ResultBundle, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    csv_path = atomic_write(out_dir / f"{bundle.config.name}.csv", bundle.csv)
    json_path = atomic_write(out_dir / f"{bundle.config.name}.json", bundle.json)
    return csv_path, json_path
