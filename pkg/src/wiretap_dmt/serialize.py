"""CSV and JSON output with locale-independent, byte-stable formatting."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

from .events import EVENTS
from .montecarlo import OutageCurve, SlopeFit

__all__ = [
    "SCHEMA_VERSION",
    "format_number",
    "curve_csv",
    "csv_header",
    "fit_record",
    "dump_json",
    "atomic_write",
]

SCHEMA_VERSION = 1


def format_number(x) -> str:
    """Integers plainly, other floats as the shortest round-trip decimal, ``None`` as empty."""
    if x is None:
        return ""
    if isinstance(x, (bool,)):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        return ""
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def csv_header() -> list[str]:
    cols = ["snr_db", "trials"]
    for e in EVENTS:
        cols += [f"{e}_count", f"{e}_p_hat", f"{e}_ci_low", f"{e}_ci_high"]
    return cols


def curve_csv(curve: OutageCurve) -> str:
    lines = [",".join(csv_header())]
    for est in curve.estimates:
        row = [est.snr_db, est.trials]
        for e in EVENTS:
            row += [est.counts[e], est.p_hat[e], est.ci_low[e], est.ci_high[e]]
        lines.append(",".join(format_number(v) for v in row))
    return "\n".join(lines) + "\n"


def fit_record(fit: SlopeFit | None, reason: str | None = None) -> dict:
    if fit is None:
        return {"available": False, "reason": reason or "unavailable"}
    return {
        "available": True,
        "slope": fit.slope,
        "stderr": fit.stderr,
        "points_used": fit.points_used,
        "p_window": list(fit.window),
        "snr_db_used": list(fit.used_snr_db),
    }


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return _clean(obj.item())
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def atomic_write(path, text: str) -> Path:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    return path
