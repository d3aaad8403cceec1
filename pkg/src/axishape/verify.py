"""Verification suites: each runs a family of invariant checks and returns a
report with one record per check (maximum observed value vs. tolerance)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import appendix_check as A
from . import catalog as C
from . import stress as S
from . import variational as V
from . import willmore as W
from .errors import DomainError
from .geometry import ModelParams, State
from .shape_eq import Jet3, integrate, residual_eq7, residual_eq7_via_general

SUITES = ("first-integral", "noether", "hj", "stress", "eq7", "appendix")

DEFAULT_SETTINGS = {
    "seed": 0,
    "tol": 1e-10,
    "n_trajectories": 20,
    # trajectories stop where |cos psi| falls below this (the rho-chart
    # first integral loses conditioning like 1/cos psi near vertical tangents)
    "cos_min": 0.25,
    "n_random_jets": 1000,
    "series_terms": 200,
    "series_sin_max": 0.9,
    "c0": 0.0,
    "lambda_t": 0.0,
    "p_t": 0.0,
    "omega0": 0.0,
}


@dataclass
class Check:
    name: str
    max_value: float
    tolerance: float
    mode: str = "le"  # "le": pass iff max_value <= tol; "ge": pass iff >= tol

    @property
    def passed(self) -> bool:
        v = self.max_value
        if not np.isfinite(v):
            return False
        return v <= self.tolerance if self.mode == "le" else v >= self.tolerance

    def as_dict(self) -> dict:
        return {"name": self.name, "max_value": float(self.max_value), "tolerance": float(self.tolerance),
                "pass": self.passed}


@dataclass
class VerificationReport:
    suite: str
    settings: dict
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> dict:
        n_fail = sum(not c.passed for c in self.checks)
        return {"n_checks": len(self.checks), "n_failed": n_fail, "pass": n_fail == 0}

    def as_dict(self) -> dict:
        return {"suite": self.suite, "settings": dict(self.settings),
                "checks": [c.as_dict() for c in self.checks], "summary": self.summary()}


class _Recorder:
    """Collects checks; a tolerance override matches ``suite/name`` or the bare name."""

    def __init__(self, overrides):
        self.overrides = dict(overrides or {})
        self.checks = []
        self.used = set()
        self.prefix = ""
        self.suite = ""

    def add(self, name, value, tol, mode="le"):
        full = self.prefix + name
        for key in (f"{self.suite}/{name}", name):
            if key in self.overrides:
                tol = float(self.overrides[key])
                self.used.add(key)
                break
        self.checks.append(Check(full, float(value), float(tol), mode))


# --------------------------------------------------------------------------


def random_willmore_trajectories(n, seed=0, tol=1e-10, cos_min=0.25):
    """Seeded random Willmore trajectories in the rho-chart."""
    rng = np.random.default_rng(seed)
    P = ModelParams()
    out = []
    for _ in range(n):
        r0 = rng.uniform(0.5, 2.0)
        st = State(r0, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        r_end = r0 * rng.uniform(0.3, 3.0)
        out.append(integrate(st, (r0, r_end), P, tol, cos_eps=cos_min))
    return out


def max_relative_drift(values):
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    return float(np.max(np.abs(v - v[0])) / max(1.0, abs(v[0])))


def _first_integral(rec, st):
    trajs = random_willmore_trajectories(st["n_trajectories"], st["seed"], st["tol"], st["cos_min"])
    rec.add("I-drift", max(max_relative_drift(p.I) for p in trajs), 1e-8)
    noether = max(float(np.nanmax(np.abs(V.noether_charge(V.dilation_generator(), p.states(), ModelParams()) + p.I)))
                  for p in trajs)
    rec.add("noether-charge-plus-I", noether, 1e-12)
    psi = np.linspace(0.1, 1.5, 60)
    sph = W.quadrature_profile(0.0, 1.0, -1, (0.1, 1.5), 60)
    cat = W.quadrature_profile(0.0, 1.0, 1, (0.1, 1.5), 60)
    rec.add("sphere-branch-I0", np.max(np.abs(sph.rho - np.sin(psi))), 1e-10)
    rec.add("catenoid-branch-I0", np.max(np.abs(cat.rho - 1 / np.sin(psi))), 1e-10)
    q = W.quadrature_profile(0.5, 1.0, 1, (0.1, 1.5), 60)
    rec.add("quadrature-I-consistency", np.nanmax(np.abs(q.I - 0.5)), 1e-9)


def _params_from(st):
    return ModelParams(c0=st["c0"], lambda_t=st["lambda_t"], p_t=st["p_t"], omega0=st["omega0"])


def _noether(rec, st):
    P = _params_from(st)
    grid = A.standard_grid()
    jet = grid.jet()
    res = np.max(np.abs(V.noether_residual(V.dilation_generator(), jet, P)))
    rec.add("dilation-residual", res, 1e-12)
    states = State(jet.rho, jet.psi, jet.psi_p)
    if P.is_willmore:
        from .willmore import first_integral

        rec.add("noether-charge-plus-I", np.max(np.abs(V.noether_charge(V.dilation_generator(), states, P)
                                                   + first_integral(states))), 1e-12)


def _hj(rec, st):
    worst = 0.0
    rho = np.logspace(np.log10(0.2), np.log10(5.0), 20)
    for Ip in (0.0, 0.5, -0.3):
        dom = W.branch_domain(Ip)
        psi = np.linspace(max(dom.psi_lo, -1.5), min(dom.psi_hi, 3.0), 60)[1:-1]
        psi = psi[np.abs(np.cos(psi)) > 1e-3]
        R, Pm = np.meshgrid(rho, psi)
        for sign in (1, -1):
            worst = max(worst, float(np.max(np.abs(V.hj_residual(Ip, R, Pm, sign)))))
    rec.add("hj-residual", worst, 1e-12)
    spread = 0.0
    for Ip, sign, rng_ in ((0.0, -1, (0.2, 2.9)), (0.0, 1, (0.2, 1.5)), (0.5, 1, (0.1, 1.5)), (-0.3, -1, (0.7, 2.5))):
        q = W.quadrature_profile(Ip, 1.3, sign, rng_, 40)
        J = V.conjugate_time(Ip, q.psi, q.rho, sign)
        spread = max(spread, float(np.max(np.abs(J - J.mean()))))
    rec.add("conjugate-time-spread", spread, 1e-9)


def _stress(rec, st):
    drift = direct = forms = 0.0
    for om in (0.0, 0.1, -0.1, 0.5, -0.5):
        P = ModelParams(omega0=om)
        for s0 in (State(1.0, 0.2, 0.1), State(0.8, -0.3, 0.4)):
            pr = integrate(s0, (s0.rho, 2.5 * s0.rho), P, st["tol"], cos_eps=st["cos_min"])
            ok = np.isfinite(pr.Q_scale)
            Q = pr.Q_scale[ok]
            cs = S.scale_charge_closed(State(pr.rho[ok], pr.psi[ok], pr.dpsi[ok], pr.z[ok]), om)
            forms = max(forms, float(np.max(np.abs(cs.Q - cs.Q_alt))))
            drift = max(drift, float(np.max(np.abs(Q - Q[0]))))
            direct = max(direct, float(np.nanmax(np.abs(S.scale_charge_along(pr) - pr.Q_scale))))
    rec.add("charge-forms-agree", forms, 1e-12)
    rec.add("charge-drift", drift, 1e-6)
    rec.add("charge-direct-vs-closed", direct, 1e-8)
    trajs = random_willmore_trajectories(5, st["seed"] + 1, st["tol"], st["cos_min"])
    rec.add("charge-equals-pi-I",
            max(float(np.nanmax(np.abs(p.Q_scale - np.pi * p.I))) for p in trajs), 1e-12)
    worst = 0.0
    for name in C.NAMES:
        e = C.make_entry(name, n=41)
        P = C.solving_params(e, lam=0.3)
        t, nrm = S.stress_divergence(e.point_at, e.parameter_grid()[2:-2], P, h=1e-3)
        worst = max(worst, float(np.max(np.abs(t))), float(np.max(np.abs(nrm))))
    rec.add("stress-divergence", worst, 1e-4)


def _eq7(rec, st):
    rng = np.random.default_rng(st["seed"])
    n = st["n_random_jets"]
    worst = 0.0
    for _ in range(n):
        P = ModelParams(*rng.uniform(-1, 1, 4))
        j = Jet3(rng.uniform(0.1, 10), rng.uniform(-1.4, 1.4), *rng.uniform(-2, 2, 3))
        a, b = residual_eq7(j, P), residual_eq7_via_general(j, P)
        worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-300))
    rec.add("convention-closure", worst, 1e-12)
    worst = 0.0
    for name in C.NAMES:
        e = C.make_entry(name)
        _, rep = C.catalog_profile(e, C.solving_params(e, lam=0.3))
        worst = max(worst, rep.max_residual)
    rec.add("catalog-residual", worst, 1e-9)
    pr = integrate(State(1.0, 0.2, 0.1), (1.0, 3.0), ModelParams(omega0=0.2), st["tol"])
    rec.add("omega-eff-drift", float(np.nanmax(np.abs(pr.omega_eff - 0.2))), 1e-6)


def _appendix(rec, st):
    n, smax = int(st["series_terms"]), float(st["series_sin_max"])
    x = np.linspace(-smax, smax, 181)
    rec.add("series-sqrt-sec",
            np.max(np.abs(A.series_sqrt_sec(x, n) - (1 - x * x) ** -0.25)), 1e-10)
    from scipy.integrate import quad

    oracle = np.array([quad(lambda t: np.sqrt(np.cos(t)), 0.0, np.arcsin(v), epsabs=1e-15, epsrel=1e-13)[0] for v in x])
    rec.add("series-int-sqrt-cos", np.max(np.abs(A.series_int_sqrt_cos(x, n) - oracle)), 1e-10)
    origin = A.rigidity_scan(ModelParams(), [A.AnsatzGenerator(C3=1.0, label="dilation")])
    rec.add("dilation-at-origin", origin.results[0].max_residual, A.PASS_THRESHOLD)
    worst_min = np.inf
    for P in A.parameter_lattice():
        if P.is_willmore:
            continue
        worst_min = min(worst_min, A.trial_residual(P, A.AnsatzGenerator(C3=1.0)))
    rec.add("dilation-off-origin-min", worst_min, A.FAIL_THRESHOLD, mode="ge")
    chain_bad = 0.0
    rho = np.array([0.5, 1.0, 2.0])
    trial = A.AnsatzGenerator(C3=1.0)
    for P in (ModelParams(c0=1.0, omega0=-0.6), ModelParams(c0=0.3, p_t=0.2), ModelParams(lambda_t=0.4)):
        chain_bad += A.coefficient_relations_check(P, trial, rho).admissible
    chain_bad += not A.coefficient_relations_check(ModelParams(), trial, rho).admissible
    rec.add("chain-violations", chain_bad, 0.0)


_RUNNERS = {
    "first-integral": _first_integral,
    "noether": _noether,
    "hj": _hj,
    "stress": _stress,
    "eq7": _eq7,
    "appendix": _appendix,
}


def run_verification(suite: str, settings: dict | None = None, tol_overrides: dict | None = None) -> VerificationReport:
    if suite not in SUITES and suite != "all":
        raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    st = dict(DEFAULT_SETTINGS)
    for k, v in (settings or {}).items():
        if k not in st:
            raise DomainError(f"unknown setting {k!r}")
        st[k] = type(st[k])(v)
    rec = _Recorder(tol_overrides)
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        rec.suite = name
        rec.prefix = f"{name}/" if suite == "all" else ""
        _RUNNERS[name](rec, st)
    unknown = set(rec.overrides) - rec.used
    if unknown:
        raise DomainError(f"tolerance override for unknown check(s): {', '.join(sorted(unknown))}")
    return VerificationReport(suite, st, rec.checks)
