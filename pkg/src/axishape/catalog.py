"""Analytic axisymmetric solutions with exact arc-length jets.

Each entry samples a parametric profile and knows the parameter constraint
under which it solves the general shape equation.  Orientation follows the
package convention: a profile traversed with increasing ``s`` has normal
``(-sin psi, cos psi)``, so the sphere and the upward cylinder have
``2H = -2/R`` and ``2H = -1/R``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DomainError
from .geometry import (
    ModelParams,
    ParametricPoint,
    Profile,
    curvatures,
    laplacian_parametric,
    mean_curvature_derivatives,
)
from .shape_eq import residual_general

RESIDUAL_TOL = 1e-9
CONSTRAINT_TOL = 1e-12


class ConstraintWarning(UserWarning):
    """A catalog shape was sampled with parameters that violate its constraint."""


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    shape: dict
    n: int = 101

    def parameter_grid(self) -> np.ndarray:
        """Sampling values of the shape's own parameter (angle, arc length, ...)."""
        return _BUILDERS[self.name].grid(self)

    def point_at(self, u):
        """``(ParametricPoint, ds/du)`` at shape-parameter values ``u``."""
        return _BUILDERS[self.name].jets(self, np.asarray(u, dtype=float))

    def points(self) -> ParametricPoint:
        b = _BUILDERS[self.name]
        u = b.grid(self)
        if self.name == "unduloid-constraint":
            return b.jets(self, u, with_arc=True)[0]
        return b.jets(self, u)[0]

    def constraint(self, params: ModelParams) -> float:
        return _BUILDERS[self.name].constraint(self, params)

    def constraint_text(self) -> str:
        return _BUILDERS[self.name].text


@dataclass
class CatalogReport:
    name: str
    shape: dict
    params: ModelParams
    max_residual: float
    constraint_value: float
    constraint_text: str
    warnings: list = field(default_factory=list)

    @property
    def constraint_ok(self) -> bool:
        return abs(self.constraint_value) <= CONSTRAINT_TOL * max(1.0, _param_scale(self.params))

    @property
    def residual_ok(self) -> bool:
        return self.max_residual <= RESIDUAL_TOL

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "shape": dict(self.shape),
            "params": self.params.as_dict() | {"lambda": self.params.lam, "p": self.params.p},
            "max_residual": self.max_residual,
            "constraint": self.constraint_text,
            "constraint_value": self.constraint_value,
            "constraint_ok": self.constraint_ok,
            "residual_ok": self.residual_ok,
            "warnings": list(self.warnings),
        }


def _param_scale(p: ModelParams) -> float:
    return max(abs(p.c0), abs(p.lam), abs(p.p), abs(p.kc))


def _positive(shape, *keys):
    for k in keys:
        if not shape.get(k, 0) > 0:
            raise DomainError(f"shape parameter {k} must be positive")


def _open_grid(a, b, n):
    """n points strictly inside (a, b)."""
    return a + (b - a) * (np.arange(n) + 0.5) / n


# --------------------------------------------------------------------------


class _Sphere:
    text = "p R^2 + 2 lambda R + kc c0^2 R - 2 kc c0 = 0"

    @staticmethod
    def grid(e):
        _positive(e.shape, "R")
        return _open_grid(0.0, np.pi, e.n)

    @staticmethod
    def jets(e, u):
        R = e.shape["R"]
        z0 = np.zeros_like(u)
        pt = ParametricPoint(s=R * u, rho=R * np.sin(u), z=-R * np.cos(u), psi=u,
                             psi_dot=z0 + 1 / R, psi_ddot=z0, psi_dddot=z0)
        return pt, z0 + R

    @staticmethod
    def constraint(e, p):
        R = e.shape["R"]
        return p.p * R**2 + 2 * p.lam * R + p.kc * p.c0**2 * R - 2 * p.kc * p.c0


class _Catenoid:
    text = "c0 = 0 and p = 0 (any lambda)"

    @staticmethod
    def grid(e):
        _positive(e.shape, "rho0")
        v_max = e.shape.get("v_max", 2.0)
        return np.linspace(-v_max, v_max, e.n)

    @staticmethod
    def jets(e, v):
        r0 = e.shape["rho0"]
        sech, th = 1 / np.cosh(v), np.tanh(v)
        pt = ParametricPoint(
            s=r0 * np.sinh(v), rho=r0 * np.cosh(v), z=r0 * v, psi=np.arccos(th),
            psi_dot=-(sech**2) / r0,
            psi_ddot=2 * sech**3 * th / r0**2,
            psi_dddot=2 * sech**4 * (sech**2 - 3 * th**2) / r0**3,
        )
        return pt, r0 * np.cosh(v)

    @staticmethod
    def constraint(e, p):
        return abs(p.c0) + abs(p.p)


class _Cylinder:
    text = "kc (c0 - e/R)(1/(2R^2) + e c0/(2R)) + e lambda/R + p = 0, e = orientation"

    @staticmethod
    def grid(e):
        _positive(e.shape, "R")
        _orientation(e)
        return np.linspace(0.0, e.shape.get("length", 1.0), e.n)

    @staticmethod
    def jets(e, s):
        R, eps = e.shape["R"], _orientation(e)
        z0 = np.zeros_like(s)
        pt = ParametricPoint(s=s, rho=z0 + R, z=eps * s, psi=z0 + eps * np.pi / 2,
                             psi_dot=z0, psi_ddot=z0, psi_dddot=z0)
        return pt, z0 + 1.0

    @staticmethod
    def constraint(e, p):
        R = e.shape["R"]
        eps = _orientation(e)
        return p.kc * (p.c0 - eps / R) * (1 / (2 * R**2) + eps * p.c0 / (2 * R)) + eps * p.lam / R + p.p


def _orientation(e):
    eps = e.shape.get("orientation", 1)
    if eps not in (1, -1):
        raise DomainError("orientation must be +1 (upward) or -1 (downward)")
    return eps


class _Unduloid:
    """Delaunay unduloid with neck radius ``a`` and bulge radius ``b``,
    parametrised by ``rho = (a+b)/2 - (b-a)/2 cos t``.

    Constant mean curvature ``H0 = -h`` with ``h = 1/(a + b)``; arc length
    and height come from quadrature of ``ds/dt`` and ``sin(psi) ds/dt``.
    """

    text = "c0 = -2 H0 and p = 2 lambda H0, H0 = -1/(a+b)"

    @staticmethod
    def _geom(a, b, t):
        h = 1.0 / (a + b)
        C = a * b / (a + b)
        rho = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(t)
        sn = C / rho + h * rho
        ds_dt = np.sqrt(rho / (h * (1 + sn)))
        return h, rho, sn, ds_dt

    @staticmethod
    def grid(e):
        _positive(e.shape, "a", "b")
        if not e.shape["a"] < e.shape["b"]:
            raise DomainError("unduloid needs neck a < bulge b")
        return np.linspace(0.0, 2 * np.pi * e.shape.get("periods", 1.0), e.n)

    @classmethod
    def jets(cls, e, t, with_arc=False):
        a, b = e.shape["a"], e.shape["b"]
        h, rho, sn, ds_dt = cls._geom(a, b, t)
        cs = 0.5 * (b - a) * np.sin(t) / ds_dt
        psi = np.arctan2(sn, cs)
        if with_arc:
            def rise(x):
                _, _, s_, d = cls._geom(a, b, x)
                return s_ * d

            s = _cumquad(lambda x: cls._geom(a, b, x)[3], t)
            z = _cumquad(rise, t)
        else:
            s = z = np.full_like(t, np.nan)
        w1 = 2 * h - sn / rho
        w2 = -cs * w1 / rho + sn * cs / rho**2
        w3 = -sn * w1 * (sn / rho**2 - w1 / rho) + cs * (
            cs * w1 / rho**2 - 2 * sn * cs / rho**3 - w2 / rho + w1 * cs / rho**2
        )
        return ParametricPoint(s=s, rho=rho, z=z, psi=psi, psi_dot=w1, psi_ddot=w2, psi_dddot=w3), ds_dt

    @staticmethod
    def constraint(e, p):
        H0 = -1.0 / (e.shape["a"] + e.shape["b"])
        return abs(p.c0 + 2 * H0) + abs(p.p - 2 * p.lam * H0)


def _cumquad(f, t):
    steps = [integrate.quad(f, t0, t1, epsabs=1e-14, epsrel=1e-13)[0] for t0, t1 in zip(t[:-1], t[1:])]
    return np.concatenate(([0.0], np.cumsum(steps)))


class _CliffordTorus:
    text = "c0 = lambda = p = 0 and R/r = sqrt(2)"

    @staticmethod
    def grid(e):
        _positive(e.shape, "R", "r")
        if not e.shape["R"] > e.shape["r"]:
            raise DomainError("torus needs R > r")
        return np.linspace(0.0, 2 * np.pi, e.n, endpoint=False)

    @staticmethod
    def jets(e, u):
        R, r = e.shape["R"], e.shape["r"]
        z0 = np.zeros_like(u)
        pt = ParametricPoint(s=r * u, rho=R + r * np.cos(u), z=r * np.sin(u), psi=u + np.pi / 2,
                             psi_dot=z0 + 1 / r, psi_ddot=z0, psi_dddot=z0)
        return pt, z0 + r

    @staticmethod
    def constraint(e, p):
        return abs(p.c0) + abs(p.lam) + abs(p.p) + abs(e.shape["R"] / e.shape["r"] - np.sqrt(2))


class _FlatDisc:
    text = "p = 0"

    @staticmethod
    def grid(e):
        _positive(e.shape, "R")
        return _open_grid(0.0, e.shape["R"], e.n)

    @staticmethod
    def jets(e, s):
        z0 = np.zeros_like(s)
        return ParametricPoint(s=s, rho=s, z=z0, psi=z0, psi_dot=z0, psi_ddot=z0, psi_dddot=z0), z0 + 1.0

    @staticmethod
    def constraint(e, p):
        return p.p


_BUILDERS = {
    "sphere": _Sphere,
    "catenoid": _Catenoid,
    "cylinder": _Cylinder,
    "unduloid-constraint": _Unduloid,
    "clifford-torus": _CliffordTorus,
    "flat-disc": _FlatDisc,
}
NAMES = tuple(_BUILDERS)

DEFAULT_SHAPES = {
    "sphere": {"R": 1.0},
    "catenoid": {"rho0": 1.0},
    "cylinder": {"R": 1.0},
    "unduloid-constraint": {"a": 0.5, "b": 1.5},
    "clifford-torus": {"R": float(np.sqrt(2)), "r": 1.0},
    "flat-disc": {"R": 1.0},
}

# shape keys with built-in fallbacks that are not part of DEFAULT_SHAPES
OPTIONAL_SHAPE_KEYS = {
    "catenoid": ("v_max",),
    "cylinder": ("orientation", "length"),
    "unduloid-constraint": ("periods",),
}


def make_entry(name: str, shape: dict | None = None, n: int = 101) -> CatalogEntry:
    if name not in _BUILDERS:
        raise DomainError(f"unknown catalog entry {name!r}; choose from {', '.join(NAMES)}")
    merged = dict(DEFAULT_SHAPES[name])
    merged.update(shape or {})
    return CatalogEntry(name, merged, n)


def solving_params(entry: CatalogEntry, kc: float = 1.0, lam: float = 0.0, c0: float | None = None) -> ModelParams:
    """Physical parameters satisfying the entry's constraint.

    ``lam`` is used where the constraint leaves the tension free and
    ``c0`` where it leaves the spontaneous curvature free.
    """
    sh = entry.shape
    c0v = 0.0 if c0 is None else c0
    if entry.name == "sphere":
        R = sh["R"]
        p = (2 * kc * c0v - kc * c0v**2 * R - 2 * lam * R) / R**2
        return ModelParams.from_physical(c0=c0v, lam=lam, p=p, kc=kc)
    if entry.name == "catenoid":
        return ModelParams.from_physical(c0=0.0, lam=lam, p=0.0, kc=kc)
    if entry.name == "cylinder":
        R, eps = sh["R"], _orientation(entry)
        p = -(kc * (c0v - eps / R) * (1 / (2 * R**2) + eps * c0v / (2 * R)) + eps * lam / R)
        return ModelParams.from_physical(c0=c0v, lam=lam, p=p, kc=kc)
    if entry.name == "unduloid-constraint":
        H0 = -1.0 / (sh["a"] + sh["b"])
        return ModelParams.from_physical(c0=-2 * H0, lam=lam, p=2 * lam * H0, kc=kc)
    if entry.name == "clifford-torus":
        return ModelParams.from_physical(kc=kc)
    return ModelParams.from_physical(c0=c0v, lam=lam, p=0.0, kc=kc)


def general_residual_at(points: ParametricPoint, params: ModelParams):
    """General shape-equation residual at parametric points with exact jets."""
    two_H, K = curvatures(points)
    _, H_s, H_ss = mean_curvature_derivatives(points)
    lap_H = laplacian_parametric(points.rho, points.psi, H_s, H_ss)
    return residual_general(two_H, K, lap_H, params)


def catalog_profile(entry: CatalogEntry, params: ModelParams | None = None):
    """Sample ``entry`` and report its residual and constraint.

    Returns ``(profile, report)``.  A violated constraint emits a
    :class:`ConstraintWarning`; the profile is produced regardless.
    """
    params = solving_params(entry) if params is None else params
    pts = entry.points()
    res = general_residual_at(pts, params)
    report = CatalogReport(entry.name, dict(entry.shape), params, float(np.max(np.abs(res))),
                           float(entry.constraint(params)), entry.constraint_text())
    if not report.constraint_ok:
        msg = f"{entry.name}: parameters violate constraint {report.constraint_text}"
        report.warnings.append(msg)
        warnings.warn(msg, ConstraintWarning, stacklevel=2)

    from .stress import scale_charge_closed
    from .willmore import first_integral
    from .geometry import State

    c = np.cos(pts.psi)
    ok = np.abs(c) >= 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        dpsi_drho = np.where(ok, pts.psi_dot / c, np.nan)
    I = np.full(len(pts.s), np.nan)
    Q = np.full(len(pts.s), np.nan)
    if np.any(ok):
        st = State(pts.rho[ok], pts.psi[ok], dpsi_drho[ok], pts.z[ok])
        I[ok] = first_integral(st)
        if params.c0 == 0 and params.lambda_t == 0 and params.p_t == 0:
            Q[ok] = scale_charge_closed(st, params.omega0, params.kc).Q
    profile = Profile(
        chart="parametric", t=np.asarray(pts.s, dtype=float), rho=np.asarray(pts.rho, dtype=float),
        psi=np.asarray(pts.psi, dtype=float), dpsi=np.asarray(pts.psi_dot, dtype=float),
        z=np.asarray(pts.z, dtype=float), params=params, I=I,
        omega_eff=np.full(len(pts.s), np.nan), Q_scale=Q,
        stats={"catalog": entry.name, **{k: float(v) for k, v in entry.shape.items()}},
    )
    return profile, report
