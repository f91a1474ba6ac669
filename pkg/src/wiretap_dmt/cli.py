"""Command-line entry point: ``wiretap-dmt {dmt,outage,bounds,verify}``.

Machine-readable results go to stdout, progress and diagnostics to stderr.
``WIRETAP_DMT_SEED`` and ``WIRETAP_DMT_THREADS`` override config values;
command-line flags override both.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import ConfigError, WiretapError
from .serialize import atomic_write, dump_json

logger = logging.getLogger("wiretap_dmt")

ENV_SEED = "WIRETAP_DMT_SEED"
ENV_THREADS = "WIRETAP_DMT_THREADS"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {text}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text}")
    return v


def _pos_int(text: str) -> int:
    v = _nonneg_int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text}")
    return v


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from None


def _env_int(name: str, parse):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return parse(raw)
    except argparse.ArgumentTypeError as exc:
        raise ConfigError(f"{name}: {exc}") from None


def resolve_seed(flag, fallback):
    if flag is not None:
        return flag
    env = _env_int(ENV_SEED, _u64)
    return fallback if env is None else env


def resolve_threads(flag, fallback=1):
    if flag is not None:
        return flag
    env = _env_int(ENV_THREADS, _nonneg_int)
    return fallback if env is None else env


def _progress_printer(quiet: bool, label: str):
    if quiet:
        return None
    last = [-1]

    def report(done, total):
        pct = int(100 * done / total)
        if pct != last[0]:
            last[0] = pct
            sys.stderr.write(f"\r{label}: {pct:3d}%")
            if done == total:
                sys.stderr.write("\n")
            sys.stderr.flush()

    return report


def cmd_dmt(args) -> int:
    from .dmt import classical_curve
    from .experiment import dmt_table_csv
    from .channel import AntennaConfig

    AntennaConfig(args.m, args.n, args.k)
    if args.r is None:
        top = classical_curve(args.m, args.n).max_multiplexing
        r_grid = [float(x) for x in np.round(np.arange(0.0, top + 1e-9, 0.25), 10)]
    else:
        r_grid = args.r
        if any(r < 0 for r in r_grid):
            raise ConfigError("r values must be >= 0")
    text = dmt_table_csv(args.m, args.n, args.k, r_grid)
    if args.out:
        path = atomic_write(Path(args.out) / f"dmt_{args.m}_{args.n}_{args.k}.csv", text)
        logger.info("wrote %s", path)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_outage(args) -> int:
    from .config import load_config
    from .experiment import run_experiment, write_bundle

    cfg = load_config(args.config)
    cfg = cfg.with_overrides(
        seed=resolve_seed(args.seed, cfg.seed),
        trials=args.trials,
        threads=resolve_threads(args.threads, cfg.threads),
    )
    out_dir = args.out or cfg.out_dir
    bundle = run_experiment(cfg, progress=_progress_printer(args.quiet, cfg.name))
    csv_path, json_path = write_bundle(bundle, out_dir)
    logger.info("wrote %s and %s", csv_path, json_path)
    sys.stdout.write(bundle.json)
    return EXIT_OK


def cmd_bounds(args) -> int:
    from .wishart import bounds_report

    report = bounds_report(args.m, args.n, args.k, args.r_s, samples=args.samples or args.trials or 1_000_000,
                           seed=resolve_seed(args.seed, 0), a=args.a)
    for c in report["checks"]:
        verdict = {True: "PASS", False: "FAIL", None: "N/A "}[c["passed"]]
        extra = f"margin {c['margin']:.4g}" if "margin" in c else c.get("reason", "")
        logger.info("[%s] %s %s", verdict, c["name"], extra)
    text = dump_json(report)
    if args.out:
        atomic_write(Path(args.out) / f"bounds_{args.m}_{args.n}_{args.k}.json", text)
    sys.stdout.write(text)
    return EXIT_OK if report["all_passed"] else EXIT_FAIL


def cmd_verify(args) -> int:
    from .acceptance import format_table, run_all

    threads = resolve_threads(args.threads, 0)

    def report(r):
        if not args.quiet:
            sys.stderr.write(r.line() + "\n")
            sys.stderr.flush()

    results = run_all(args.criteria, threads=threads, report=report)
    sys.stdout.write(format_table(results) + "\n")
    if args.out:
        rows = [r.__dict__ for r in results]
        atomic_write(Path(args.out) / "verify.json", dump_json({"schema_version": 1, "results": rows}))
    failed = sorted({r.criterion for r in results if not r.passed})
    if failed:
        sys.stderr.write(f"failing criteria: {', '.join(map(str, failed))}\n")
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="experiment file (key = value lines)")
    common.add_argument("--out", metavar="DIR", help="directory for output files")
    common.add_argument("--seed", type=_u64, metavar="U64", help=f"master seed (env {ENV_SEED})")
    common.add_argument("--trials", type=_pos_int, metavar="N", help="Monte Carlo trials per SNR point")
    common.add_argument("--threads", type=_nonneg_int, metavar="N", help=f"worker threads, 0 = auto (env {ENV_THREADS})")
    common.add_argument("--quiet", action="store_true", help="no progress output")

    parser = argparse.ArgumentParser(prog="wiretap-dmt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dmt", parents=[common], help="tabulate the analytic tradeoff curves")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--r", type=_float_list, help="comma-separated multiplexing gains (default 0 to max, step 0.25)")
    p.set_defaults(func=cmd_dmt)

    p = sub.add_parser("outage", parents=[common], help="simulate outage over an SNR grid and fit slopes")
    p.set_defaults(func=cmd_outage)

    p = sub.add_parser("bounds", parents=[common], help="validate the eigenvalue bounds")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("r_s", type=float)
    p.add_argument("--samples", type=_pos_int, help="eigenvalue samples (default 10^6)")
    p.add_argument("--a", type=float, default=2.0, help="conditioning threshold for the lower-bound check")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.add_argument("--criteria", type=lambda s: [int(x) for x in s.split(",")], help="subset, e.g. 4,7,9")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
    )
    if args.command == "outage" and not args.config:
        parser.error("outage requires --config PATH")
    try:
        return args.func(args)
    except WiretapError as exc:
        sys.stderr.write(f"wiretap-dmt {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except KeyboardInterrupt:
        sys.stderr.write("interrupted\n")
        return 130


if __name__ == "__main__":
    sys.exit(main())
