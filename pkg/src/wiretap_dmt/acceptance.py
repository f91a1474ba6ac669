"""Acceptance suite with pinned seeds, shared by ``wiretap-dmt verify`` and the tests.

Each criterion returns one or more :class:`CheckResult` rows. Sweeps run on a
30-60 dB grid, where the simulated curves have settled onto their asymptotic
slopes at these trial counts.
"""

from __future__ import annotations

import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import AntennaConfig
from .config import ExperimentConfig
from .dmt import (
    classical_curve,
    dmt_classical,
    secret_csit_curve,
    secret_dmt_csit,
    secret_dmt_no_csit,
    secret_no_csit_curve,
)
from .events import build_plan, classify
from .experiment import dmt_table_csv, run_experiment, write_bundle
from .montecarlo import sample_channel_block
from .rates import SchemeKind, scheme_rates, secrecy_rate_csit_high_snr, zero_forcing_leakage
from .wishart import check_tail_bound, density_normalization, exponent_constants

__all__ = ["CheckResult", "CRITERIA", "run_criterion", "run_all", "format_table", "SWEEP_GRID_DB"]

SWEEP_GRID_DB = (30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0)
TAIL_C_GRID = (0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    label: str
    expected: str
    observed: str
    passed: bool

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] {self.criterion:>2} {self.label}: expected {self.expected}; observed {self.observed}"


def _sweep_config(name, m, n, k, scheme, r_s, trials, seed, **kw) -> ExperimentConfig:
    return ExperimentConfig(
        m=m, n=n, k=k, scheme=scheme, r_s=r_s, snr_db=kw.pop("snr_db", SWEEP_GRID_DB),
        trials=trials, seed=seed, name=name, **kw,
    )


CONFIGS = {
    "iso_2_2_1": _sweep_config("iso_2_2_1", 2, 2, 1, "isotropic_no_csit", 0.75, 200_000, 101),
    "zf_2_2_1": _sweep_config("zf_2_2_1", 2, 2, 1, "zero_forcing", 0.75, 1_000_000, 102),
    "csit_2_2_1": _sweep_config("csit_2_2_1", 2, 2, 1, "csit_high_snr", 0.75, 1_000_000, 103),
    "zf_2_1_1": _sweep_config("zf_2_1_1", 2, 1, 1, "zero_forcing", 0.75, 100_000, 104),
    "an_2_1_1": _sweep_config("an_2_1_1", 2, 1, 1, "artificial_noise", 0.75, 100_000, 105),
    # steep point: outage is only measurable at low SNR with 10^6 trials
    "classical_r0.5": _sweep_config(
        "classical_r0.5", 2, 2, 0, "isotropic_no_csit", 0.5, 1_000_000, 106,
        snr_db=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0), event="main_outage", tolerance=0.2,
    ),
    "classical_r1.5": _sweep_config(
        "classical_r1.5", 2, 2, 0, "isotropic_no_csit", 1.5, 200_000, 107, event="main_outage", tolerance=0.15,
    ),
    "degenerate_2_2_2": _sweep_config(
        "degenerate_2_2_2", 2, 2, 2, "isotropic_no_csit", 0.25, 100_000, 108, fit_p_max=1.0, tolerance=0.05,
    ),
}


def _sweep_check(criterion: int, key: str, predicted: float, threads) -> tuple[CheckResult, object]:
    cfg = CONFIGS[key]
    bundle = run_experiment(cfg, threads=threads)
    fit = bundle.fits[cfg.event]
    expected = f"{cfg.event} diversity {predicted:g} +/- {cfg.tolerance:g}"
    if fit is None:
        reason = bundle.summary["fits"][cfg.event]["reason"]
        return CheckResult(criterion, key, expected, f"fit unavailable ({reason})", False), bundle
    ok = abs(fit.slope - predicted) <= cfg.tolerance
    observed = f"{fit.slope:.3f} (stderr {fit.stderr:.3f}, {fit.points_used} points)"
    return CheckResult(criterion, key, expected, observed, ok), bundle


def criterion_1(threads=0):
    pred = secret_dmt_no_csit(2, 2, 1, 0.75)
    return [_sweep_check(1, "iso_2_2_1", pred, threads)[0]]


def criterion_2(threads=0):
    pred = secret_dmt_csit(2, 2, 1, 0.75)
    return [_sweep_check(2, key, pred, threads)[0] for key in ("zf_2_2_1", "csit_2_2_1")]


def criterion_3(threads=0):
    pred = secret_dmt_csit(2, 1, 1, 0.75)
    zf, zf_bundle = _sweep_check(3, "zf_2_1_1", pred, threads)
    an, an_bundle = _sweep_check(3, "an_2_1_1", pred, threads)
    ev = "secrecy_rate_outage"
    worse = []
    compared = 0
    for e_zf, e_an in zip(zf_bundle.curve.estimates, an_bundle.curve.estimates):
        if e_zf.counts[ev] >= 100 and e_an.counts[ev] >= 100:
            compared += 1
            if e_zf.p_hat[ev] > e_an.p_hat[ev]:
                worse.append(e_zf.snr_db)
    order = CheckResult(
        3,
        "zero_forcing outage <= artificial_noise outage",
        "at every grid point with >= 100 events",
        f"{compared} points compared, violations at {worse or 'none'}",
        compared > 0 and not worse,
    )
    return [zf, an, order]


def criterion_4(threads=None):
    checks = []

    def add(label, expected, observed):
        checks.append(CheckResult(4, label, repr(expected), repr(observed), expected == observed))

    row = dmt_table_csv(3, 4, 2, [0]).splitlines()[1]
    add("(3,4,2) table row at r=0", "0,12,2,4", row)
    add("(3,4,2) classical max r", 3.0, classical_curve(3, 4).max_multiplexing)
    add("(3,4,2) no-CSIT kinks", ((0, 2), (1, 0)), secret_no_csit_curve(3, 4, 2).kink_points)
    add("(3,4,2) CSIT d(0), max r", (4.0, 1.0), (secret_csit_curve(3, 4, 2)(0), secret_csit_curve(3, 4, 2).max_multiplexing))
    add("(4,2,1) CSIT max r", 2.0, secret_csit_curve(4, 2, 1).max_multiplexing)
    add("(4,2,1) no-CSIT max r", 1.0, secret_no_csit_curve(4, 2, 1).max_multiplexing)
    add("(4,2,1) table row at r=2", "2,0,,0", dmt_table_csv(4, 2, 1, [2]).splitlines()[1])
    add("(1,1,1) table row at r=0.5", "0.5,0.5,,", dmt_table_csv(1, 1, 1, [0.5]).splitlines()[1])
    return checks


def criterion_5(threads=0):
    return [
        _sweep_check(5, "classical_r0.5", dmt_classical(2, 2, 0.5), threads)[0],
        _sweep_check(5, "classical_r1.5", dmt_classical(2, 2, 1.5), threads)[0],
    ]


def criterion_6(threads=0):
    return [_sweep_check(6, "degenerate_2_2_2", 0.0, threads)[0]]


def criterion_7(threads=None, trials=100_000):
    checks = []
    for seed, (m, n, k) in enumerate([(2, 2, 1), (2, 1, 1), (3, 3, 2), (4, 2, 3)], start=700):
        cfg = AntennaConfig(m, n, k)
        ch = sample_channel_block(cfg, seed, 0, 0, trials)
        leak = np.asarray(zero_forcing_leakage(ch))
        snr = 10.0**3
        rates = scheme_rates(SchemeKind.ZERO_FORCING, ch, snr)
        plan = build_plan("csit_adaptive", ch, 0.75, snr, SchemeKind.ZERO_FORCING, rates=rates)
        outcome = classify(ch, plan, SchemeKind.ZERO_FORCING, snr, rates=rates)
        sna = int(np.count_nonzero(outcome.secrecy_not_achieved))
        i_eve_max = float(np.max(np.abs(rates.i_eve)))
        ok = bool(np.all(leak <= 1e-10)) and sna == 0 and i_eve_max == 0.0
        checks.append(
            CheckResult(
                7,
                f"zero-forcing leakage {cfg.as_tuple()}",
                "|H_E A|_F <= 1e-10 |H_E|_F, i_eve = 0, no secrecy failures",
                f"max leakage {leak.max():.2e}, max i_eve {i_eve_max:g}, {sna} failures in {trials}",
                ok,
            )
        )
    return checks


def criterion_8(threads=None, trials=100_000):
    checks = []
    cases = [
        ((2, 2, 1), SchemeKind.ISOTROPIC_NO_CSIT),
        ((2, 1, 1), SchemeKind.ARTIFICIAL_NOISE),
        ((2, 2, 1), SchemeKind.CSIT_HIGH_SNR),
        ((3, 2, 2), SchemeKind.ISOTROPIC_NO_CSIT),
    ]
    for seed, (mnk, scheme) in enumerate(cases, start=800):
        cfg = AntennaConfig(*mnk)
        ch = sample_channel_block(cfg, seed, 0, 0, trials)
        snr = 10.0**3
        rates = scheme_rates(scheme, ch, snr)
        plan = build_plan("csit_adaptive", ch, 0.75, snr, scheme, rates=rates)
        out = classify(ch, plan, scheme, snr, rates=rates)
        mismatches = int(np.count_nonzero(out.main_outage != out.secrecy_rate_outage))
        checks.append(
            CheckResult(
                8,
                f"adaptive plan event identity {mnk} {scheme.value}",
                "main_outage == secrecy_rate_outage in every trial",
                f"{mismatches} mismatches in {trials} ({int(np.count_nonzero(out.main_outage))} outages)",
                mismatches == 0,
            )
        )
    return checks


def criterion_9(threads=None, trials=1000):
    checks = []
    for seed, mnk in enumerate([(2, 2, 2), (2, 2, 3)], start=900):
        ch = sample_channel_block(AntennaConfig(*mnk), seed, 0, 0, trials)
        lo = np.asarray(secrecy_rate_csit_high_snr(ch, 10.0**2))
        hi = np.asarray(secrecy_rate_csit_high_snr(ch, 10.0**4))
        same = lo.tobytes() == hi.tobytes()
        checks.append(
            CheckResult(
                9,
                f"csit_high_snr SNR independence {mnk}",
                "bitwise equal at 20 and 40 dB",
                f"{int(np.count_nonzero(lo != hi))} of {trials} differ",
                same,
            )
        )
    return checks


def criterion_10(threads=None, samples=1_000_000):
    checks = []
    for m in range(1, 5):
        for k in range(1, m + 1):
            if k <= 2:
                total = density_normalization(m, k)
                checks.append(
                    CheckResult(10, f"density normalization m={m} k={k}", "1 +/- 1e-3", f"{total:.12f}", abs(total - 1) <= 1e-3)
                )
            rows = check_tail_bound(m, k, TAIL_C_GRID, samples=samples, seed=1000 + 10 * m + k)
            bad = [r["C"] for r in rows if not r["passed"]]
            worst = min(rows, key=lambda r: r["margin"] / max(r["stderr"], 1e-300))
            checks.append(
                CheckResult(
                    10,
                    f"tail bound m={m} k={k}",
                    f"empirical P(mu_k > C) <= bound at C in {list(TAIL_C_GRID)}",
                    f"violations at {bad or 'none'}; tightest C={worst['C']:g}: "
                    f"empirical {worst['empirical']:.4g} vs bound {worst['bound']:.4g}",
                    not bad,
                )
            )
    c0 = exponent_constants(2, 2, 1, 0.75)[0]
    d = secret_dmt_no_csit(2, 2, 1, 0.75)
    checks.append(CheckResult(10, "exponent cross-check (2,2,1,0.75)", "c0 == d_s == 0.25", f"c0={c0!r}, d_s={d!r}", c0 == d == 0.25))
    return checks


def criterion_11(threads=None):
    checks = []
    for key in ("zf_2_1_1", "degenerate_2_2_2"):
        cfg = CONFIGS[key]
        blobs = []
        for t in (1, 4):
            bundle = run_experiment(cfg, threads=t)
            with tempfile.TemporaryDirectory() as tmp:
                csv_path, json_path = write_bundle(bundle, tmp)
                blobs.append((Path(csv_path).read_bytes(), Path(json_path).read_bytes()))
        same = blobs[0] == blobs[1]
        checks.append(
            CheckResult(
                11,
                f"determinism {key}",
                "byte-identical CSV and JSON for threads 1 and 4",
                "identical" if same else "outputs differ",
                same,
            )
        )
    return checks


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}


def run_criterion(number: int, threads=0) -> list[CheckResult]:
    return CRITERIA[number](threads=threads)


def run_all(selected=None, threads=0, report=None) -> list[CheckResult]:
    results = []
    for number in selected or sorted(CRITERIA):
        rows = run_criterion(number, threads)
        if report is not None:
            for r in rows:
                report(r)
        results.extend(rows)
    return results


def format_table(results) -> str:
    header = ("criterion", "check", "expected", "observed", "verdict")
    rows = [(str(r.criterion), r.label, r.expected, r.observed, "PASS" if r.passed else "FAIL") for r in results]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(header)]
    fmt = " | ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), "-+-".join("-" * w for w in widths)]
    lines += [fmt.format(*row) for row in rows]
    return "\n".join(lines)

