"""Profile CSV files and verification-report JSON.

CSV layout: one ``# key=value;...`` metadata line, a header line, then one
row per point with columns ``t,rho,psi,dpsi,z,I,omega_eff,Q_scale``.  Floats
are written with 17 significant digits; NaN is written as an empty field.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .errors import DomainError
from .geometry import ModelParams, Profile

COLUMNS = ("t", "rho", "psi", "dpsi", "z", "I", "omega_eff", "Q_scale")
_PARAM_KEYS = ("c0", "lambda_t", "p_t", "omega0", "kc", "kbar", "lambda_phys", "p_phys")


def _fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".17g")


def _parse(s: str) -> float:
    return float("nan") if s.strip() == "" else float(s)


def profile_to_csv(profile: Profile) -> str:
    meta = {
        "chart": profile.chart,
        "branch_sign": str(profile.branch_sign),
        "rho0": _fmt(profile.rho0),
        "termination": profile.termination,
    }
    for k in _PARAM_KEYS:
        v = getattr(profile.params, k)
        meta[k] = "" if v is None else _fmt(v)
    buf = _io.StringIO()
    buf.write("# " + ";".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    cols = [getattr(profile, c) for c in COLUMNS]
    for row in zip(*cols):
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def profile_from_csv(text: str) -> Profile:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise DomainError("missing '# key=value;...' metadata line")
    meta = {}
    for item in lines[0][1:].strip().split(";"):
        if not item:
            continue
        if "=" not in item:
            raise DomainError(f"bad metadata item {item!r}")
        k, v = item.split("=", 1)
        meta[k.strip()] = v.strip()
    rows = list(csv.reader(lines[1:]))
    if not rows or tuple(rows[0]) != COLUMNS:
        raise DomainError(f"expected header {','.join(COLUMNS)}")
    data = np.array([[_parse(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, len(COLUMNS))
    pkw = {}
    for k in _PARAM_KEYS:
        v = meta.get(k, "")
        if v != "":
            pkw[k] = float(v)
    params = ModelParams(**pkw)
    cols = {c: data[:, i] for i, c in enumerate(COLUMNS)}
    return Profile(
        chart=meta.get("chart", "rho"),
        branch_sign=int(meta.get("branch_sign", "1")),
        rho0=_parse(meta.get("rho0", "")),
        termination=meta.get("termination", "span-end"),
        params=params,
        **cols,
    )


def write_profile(profile: Profile, path) -> None:
    """Write to ``path``; ``'-'`` means standard output."""
    text = profile_to_csv(profile)
    if str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_profile(path) -> Profile:
    return profile_from_csv(Path(path).read_text())


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def report_to_json(report: dict, timestamp: str | None = None) -> str:
    """Deterministic JSON (sorted keys); ``timestamp`` goes under ``metadata`` only if given."""
    body = dict(report)
    if timestamp is not None:
        body["metadata"] = {"timestamp": timestamp}
    return json.dumps(_jsonable(body), indent=2, sort_keys=True) + "\n"


def write_report(report: dict, path, timestamp: str | None = None) -> None:
    text = report_to_json(report, timestamp)
    if str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
