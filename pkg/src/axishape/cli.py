"""``axishape`` command-line interface.

Exit codes: 0 success, 1 a check or the numerics failed, 2 usage or
configuration error.  Every long flag of a subcommand may also be given in a
plain ``key=value`` file passed with ``--config``; explicit flags win.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import appendix_check as A
from . import catalog as C
from . import io
from . import willmore as W
from .errors import DomainError, SingularError, StepSizeError
from .geometry import ModelParams, State
from .shape_eq import integrate
from .verify import SUITES, run_verification

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad flags, config files or parameter strings."""


# -- parsing helpers ---------------------------------------------------------


def parse_kv_list(text: str, what: str = "value") -> dict:
    """``"a=1,b=2"`` -> ``{"a": "1", "b": "2"}``."""
    out = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        if "=" not in item:
            raise UsageError(f"expected key=value in {what}, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _float_map(d: dict, what: str) -> dict:
    try:
        return {k: float(v) for k, v in d.items()}
    except ValueError as exc:
        raise UsageError(f"non-numeric {what}: {exc}") from None


def read_config(path) -> dict:
    """Parse a ``key=value`` file; blank lines and ``#`` comments are ignored."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().lstrip("-").replace("_", "-")] = v.strip()
    return out


def _split_config(argv):
    """Pull ``--config PATH`` / ``--config=PATH`` out of argv, wherever it appears."""
    rest, path = [], None
    it = iter(argv)
    for a in it:
        if a == "--config":
            path = next(it, None)
            if path is None:
                raise UsageError("--config needs a path")
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
        else:
            rest.append(a)
    return rest, path


def _convert(action: argparse.Action, raw: str):
    if isinstance(action, argparse._StoreTrueAction):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"not a boolean for {action.option_strings[0]}: {raw!r}")
    conv = action.type or str
    try:
        if action.nargs in ("+", "*"):
            return [conv(x) for x in raw.replace(",", " ").split()]
        value = conv(raw)
    except (TypeError, ValueError):
        raise UsageError(f"bad value for {action.option_strings[0]}: {raw!r}") from None
    if action.choices is not None and value not in action.choices:
        raise UsageError(f"{action.option_strings[0]} must be one of {list(action.choices)}")
    return value


def _apply_config(sub: argparse.ArgumentParser, cfg: dict):
    by_flag = {}
    for act in sub._actions:
        for opt in act.option_strings:
            if opt.startswith("--"):
                by_flag[opt[2:]] = act
    defaults = {}
    for key, raw in cfg.items():
        act = by_flag.get(key)
        if act is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r} for {sub.prog}")
        defaults[act.dest] = _convert(act, raw)
    sub.set_defaults(**defaults)


# -- subcommands -------------------------------------------------------------


def _cmd_solve(args) -> int:
    params = ModelParams(args.c0, args.lambda_t, args.pressure_t, args.omega0, kc=args.kc)
    start = State(args.rho0, args.psi0, args.dpsi0, 0.0)
    try:
        prof = integrate(start, (args.rho0, args.rho_end), params, args.tol,
                         cos_eps=args.cos_eps, backend=args.backend)
    except (SingularError, StepSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    io.write_profile(prof, args.out)
    print(f"termination={prof.termination} points={len(prof)} rho_last={float(prof.rho[-1])!r}", file=sys.stderr)
    return EXIT_OK


def _willmore_name(I: float) -> str:
    return f"willmore_I{I:+.6g}.csv"


def _cmd_willmore(args) -> int:
    values = list(args.I)
    profiles = [W.quadrature_profile(I, args.rho0, args.sign, (args.psi_start, args.psi_end), args.n)
                for I in values]
    if len(values) == 1:
        io.write_profile(profiles[0], args.out)
        return EXIT_OK
    if args.out == "-":
        raise UsageError("several --I values need --out DIRECTORY")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for I, prof in zip(values, profiles):
        io.write_profile(prof, outdir / _willmore_name(I))
    return EXIT_OK


_PHYS_KEYS = {"c0", "lambda", "p", "kc", "omega0"}


def catalog_request(name: str, text: str | None):
    """Split a ``--params`` string into shape and physical parameters."""
    kv = parse_kv_list(text or "", "--params")
    values = _float_map(kv, "--params")
    phys = {k: v for k, v in values.items() if k in _PHYS_KEYS}
    shape = {k: v for k, v in values.items() if k not in _PHYS_KEYS}
    unknown = set(shape) - set(C.DEFAULT_SHAPES[name]) - set(C.OPTIONAL_SHAPE_KEYS.get(name, ()))
    if unknown:
        raise UsageError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    entry = C.make_entry(name, shape)
    kc = phys.get("kc", 1.0)
    if "p" in phys:
        params = ModelParams.from_physical(c0=phys.get("c0", 0.0), lam=phys.get("lambda", 0.0),
                                           p=phys["p"], omega0=phys.get("omega0", 0.0), kc=kc)
    else:
        params = C.solving_params(entry, kc=kc, lam=phys.get("lambda", 0.0), c0=phys.get("c0"))
        if "omega0" in phys:
            params = params.replace(omega0=phys["omega0"])
    return entry, params


def _cmd_catalog(args) -> int:
    if args.name is None:
        raise UsageError("catalog needs --name")
    entry, params = catalog_request(args.name, args.params)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", C.ConstraintWarning)
        prof, rep = C.catalog_profile(entry, params)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.out:
        io.write_profile(prof, args.out)
    if args.report:
        io.write_report(rep.as_dict(), args.report)
    if args.check:
        ok = rep.residual_ok and rep.constraint_ok
        print(f"{entry.name}: max residual {rep.max_residual:.3e}, constraint "
              f"{rep.constraint_value:.3e} -> {'PASS' if ok else 'FAIL'}")
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


def _cmd_verify(args) -> int:
    settings = {"seed": args.seed}
    for key in ("c0", "lambda_t", "p_t", "omega0"):
        v = getattr(args, key)
        if v is not None:
            settings[key] = v
    overrides = _float_map(parse_kv_list(args.tol_overrides or "", "--tol-overrides"), "tolerance")
    rep = run_verification(args.suite, settings, overrides)
    body = rep.as_dict()
    if args.expect_broken:
        body["summary"]["expect_broken"] = True
    if args.report:
        io.write_report(body, args.report, timestamp=args.timestamp)
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.max_value:.3e} (tol {c.tolerance:.1e})")
    if args.expect_broken:
        broken = not rep.passed
        print("expected failure observed" if broken else "expected failure NOT observed")
        return EXIT_OK if broken else EXIT_FAIL
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_series(args) -> int:
    x = np.asarray(args.sin_psi, dtype=float)
    sec = A.series_sqrt_sec(x, args.n)
    integral = A.series_int_sqrt_cos(x, args.n)
    print("sin_psi,sqrt_sec_series,sqrt_sec_exact,int_sqrt_cos_series")
    for xi, a, b in zip(x, sec, integral):
        print(f"{xi:.17g},{a:.17g},{(1 - xi * xi) ** -0.25:.17g},{b:.17g}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="axishape", description=__doc__.splitlines()[0])
    p.add_argument("--config", metavar="PATH", help="key=value file supplying flag values")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    s = sub.add_parser("solve", help="integrate the reduced shape equation over rho")
    s.add_argument("--c0", type=float, default=0.0)
    s.add_argument("--lambda-t", type=float, default=0.0)
    s.add_argument("--pressure-t", type=float, default=0.0)
    s.add_argument("--omega0", type=float, default=0.0)
    s.add_argument("--kc", type=float, default=1.0)
    s.add_argument("--rho0", type=float, default=1.0)
    s.add_argument("--psi0", type=float, default=0.0)
    s.add_argument("--dpsi0", type=float, default=0.0)
    s.add_argument("--rho-end", type=float, default=2.0)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--cos-eps", type=float, default=1e-6, help="stop where |cos psi| drops below this")
    s.add_argument("--backend", choices=("cython", "python"), default=None)
    s.add_argument("--out", default="-", help="CSV path ('-' = stdout)")
    s.set_defaults(func=_cmd_solve)

    w = sub.add_parser("willmore", help="quadrature solution of the conformal first integral")
    w.add_argument("--I", type=float, nargs="+", default=[0.0], help="one or more first-integral values")
    w.add_argument("--rho0", type=float, default=1.0, help="rho at psi = pi/2")
    w.add_argument("--sign", type=int, choices=(1, -1), default=1)
    w.add_argument("--psi-start", type=float, default=0.2)
    w.add_argument("--psi-end", type=float, default=1.5)
    w.add_argument("--n", type=int, default=200)
    w.add_argument("--out", default="-", help="CSV path, or a directory when several --I are given")
    w.set_defaults(func=_cmd_willmore)

    c = sub.add_parser("catalog", help="analytic solutions with residual and constraint report")
    c.add_argument("--name", choices=C.NAMES, default=None)
    c.add_argument("--params", default=None, metavar="K=V,...",
                   help="shape radii and physical c0, lambda, p, kc, omega0")
    c.add_argument("--check", action="store_true", help="exit 1 unless residual and constraint hold")
    c.add_argument("--out", default=None, help="CSV path for the sampled profile")
    c.add_argument("--report", default=None, help="JSON path for the residual report")
    c.set_defaults(func=_cmd_catalog)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--tol-overrides", default=None, metavar="NAME=TOL,...")
    v.add_argument("--report", default=None, help="JSON report path ('-' = stdout)")
    v.add_argument("--expect-broken", action="store_true",
                   help="succeed only if at least one check fails")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--c0", type=float, default=None)
    v.add_argument("--lambda-t", type=float, default=None)
    v.add_argument("--pressure-t", dest="p_t", type=float, default=None)
    v.add_argument("--omega0", type=float, default=None)
    v.add_argument("--timestamp", default=None, help="recorded under metadata in the JSON report")
    v.set_defaults(func=_cmd_verify)

    r = sub.add_parser("series", help="evaluate the truncated sin(psi) series")
    r.add_argument("--n", type=int, default=50)
    r.add_argument("--sin-psi", type=float, nargs="+", default=[0.5])
    r.set_defaults(func=_cmd_series)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv, cfg_path = _split_config(argv)
        cfg = read_config(cfg_path) if cfg_path else {}
        command = next((a for a in argv if a in parser._subparsers._group_actions[0].choices), None)
        if command is None and "command" in cfg:
            command = cfg.pop("command")
            argv = [command] + argv
        else:
            cfg.pop("command", None)
        if command is None and any(a in ("-h", "--help") for a in argv):
            parser.print_help()
            return EXIT_OK
        if command is None:
            parser.print_usage(sys.stderr)
            print("axishape: error: a subcommand is required", file=sys.stderr)
            return EXIT_USAGE
        if cfg:
            subparser = parser._subparsers._group_actions[0].choices[command]
            _apply_config(subparser, cfg)
    except UsageError as exc:
        print(f"axishape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"axishape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularError, StepSizeError, ArithmeticError, RuntimeError) as exc:
        print(f"axishape: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
