"""Surface-of-revolution types, curvatures and the meridional Laplacian.

Sign convention (used throughout the package)::

    2H = -(rho sin psi)'/rho = -(psi' cos psi + sin psi / rho)
    K  = psi' cos psi sin psi / rho

i.e. the principal curvatures are ``-psi' cos psi`` (meridian) and
``-sin psi / rho`` (parallel).  With the unit normal ``n = (-sin psi, cos psi)``
in the meridian plane this is ``K_ab = e_a . d_b n``.  A sphere traversed from
its lower pole has ``2H = -2/R``.

All functions accept scalars or numpy arrays in the dataclass fields.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError, SingularError

#: rho-chart is declared invalid below this |cos psi|
TURNING_EPS = 1e-8


@dataclass(frozen=True)
class ModelParams:
    """Reduced and physical parameters of the shape equation.

    ``lambda_t`` and ``p_t`` are the reduced tension and pressure of the
    second-order equation, ``omega0`` its axial first integral.  The physical
    tension and pressure are derived from the reduced ones unless given
    explicitly, in which case the two sets must be consistent.
    """

    c0: float = 0.0
    lambda_t: float = 0.0
    p_t: float = 0.0
    omega0: float = 0.0
    kc: float = 1.0
    kbar: float = 0.0
    lambda_phys: float | None = None
    p_phys: float | None = None

    def __post_init__(self):
        if not self.kc > 0:
            raise DomainError(f"bending modulus kc must be positive, got {self.kc}")
        if self.lambda_phys is not None:
            expected = self.lambda_phys / self.kc + 0.5 * self.c0**2
            if not math.isclose(expected, self.lambda_t, rel_tol=1e-12, abs_tol=1e-12):
                raise DomainError(
                    f"lambda_t={self.lambda_t} inconsistent with lambda/kc + c0^2/2 = {expected}"
                )
        if self.p_phys is not None:
            if not math.isclose(self.p_phys / self.kc, self.p_t, rel_tol=1e-12, abs_tol=1e-12):
                raise DomainError(f"p_t={self.p_t} inconsistent with p/kc = {self.p_phys / self.kc}")

    @classmethod
    def from_physical(cls, c0=0.0, lam=0.0, p=0.0, omega0=0.0, kc=1.0, kbar=0.0):
        return cls(
            c0=c0,
            lambda_t=lam / kc + 0.5 * c0**2,
            p_t=p / kc,
            omega0=omega0,
            kc=kc,
            kbar=kbar,
            lambda_phys=lam,
            p_phys=p,
        )

    @property
    def lam(self) -> float:
        """Physical tension."""
        if self.lambda_phys is not None:
            return self.lambda_phys
        return self.kc * (self.lambda_t - 0.5 * self.c0**2)

    @property
    def p(self) -> float:
        """Physical pressure."""
        if self.p_phys is not None:
            return self.p_phys
        return self.kc * self.p_t

    @property
    def is_willmore(self) -> bool:
        return self.c0 == 0 and self.lambda_t == 0 and self.p_t == 0 and self.omega0 == 0

    def replace(self, **changes) -> "ModelParams":
        # physical values are re-derived unless explicitly passed
        changes.setdefault("lambda_phys", None)
        changes.setdefault("p_phys", None)
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return {
            "c0": self.c0,
            "lambda_t": self.lambda_t,
            "p_t": self.p_t,
            "omega0": self.omega0,
            "kc": self.kc,
        }


@dataclass(frozen=True)
class State:
    """Point of the rho-chart jet: radius, tangent angle, d(psi)/d(rho), height."""

    rho: Any
    psi: Any
    psi_p: Any
    z: Any = 0.0


@dataclass(frozen=True)
class ParametricPoint:
    """Point of an arc-length parametrised profile with psi-derivatives in s."""

    s: Any
    rho: Any
    z: Any
    psi: Any
    psi_dot: Any
    psi_ddot: Any = 0.0
    psi_dddot: Any = 0.0


CHARTS = ("rho", "psi", "parametric")
TERMINATIONS = ("span-end", "turning-point", "axis", "singular")


@dataclass
class Profile:
    """Sampled profile curve.

    ``t`` is the chart's independent variable (rho, psi or s).  ``dpsi`` is
    d(psi)/d(rho) in the rho- and psi-charts and d(psi)/ds in the parametric
    chart.  Optional sample columns ``I``, ``omega_eff`` and ``Q_scale`` hold
    NaN where undefined.
    """

    chart: str
    t: np.ndarray
    rho: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    z: np.ndarray
    params: ModelParams = field(default_factory=ModelParams)
    branch_sign: int = 1
    rho0: float = float("nan")
    termination: str = "span-end"
    I: np.ndarray | None = None
    omega_eff: np.ndarray | None = None
    Q_scale: np.ndarray | None = None
    stats: dict = field(default_factory=dict)
    dense: Any = None

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise DomainError(f"unknown chart {self.chart!r}")
        if self.branch_sign not in (1, -1):
            raise DomainError("branch_sign must be +1 or -1")
        if self.termination not in TERMINATIONS:
            raise DomainError(f"unknown termination {self.termination!r}")
        for name in ("t", "rho", "psi", "dpsi", "z"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.t.shape[0]
        for name in ("I", "omega_eff", "Q_scale"):
            val = getattr(self, name)
            val = np.full(n, np.nan) if val is None else np.asarray(val, dtype=float)
            setattr(self, name, val)
        if n >= 2:
            d = np.diff(self.t)
            if not (np.all(d > 0) or np.all(d < 0)):
                raise DomainError("profile points must be strictly monotone in t")

    def __len__(self):
        return self.t.shape[0]

    def state(self, i: int) -> State:
        return State(self.rho[i], self.psi[i], self.dpsi[i], self.z[i])

    def states(self) -> State:
        """All points as one State with array fields."""
        return State(self.rho, self.psi, self.dpsi, self.z)


def _check_rho(rho):
    if np.any(np.asarray(rho) <= 0):
        raise DomainError("rho must be positive")


def principal_curvatures(point):
    """Meridional and parallel principal curvatures ``(k_m, k_p)``."""
    _check_rho(point.rho)
    if isinstance(point, ParametricPoint):
        k_m = -np.asarray(point.psi_dot, dtype=float)
    else:
        k_m = -point.psi_p * np.cos(point.psi)
    k_p = -np.sin(point.psi) / point.rho
    return k_m, k_p


def curvatures(point):
    """Return ``(2H, K)`` for a :class:`State` or :class:`ParametricPoint`."""
    k_m, k_p = principal_curvatures(point)
    return k_m + k_p, k_m * k_p


def laplacian_meridional(rho, psi, psi_p, f_p, f_pp):
    """Laplace-Beltrami operator of an axisymmetric scalar given its rho-derivatives.

    ``(cos psi / rho) d/drho (rho cos psi df/drho)``
    """
    _check_rho(rho)
    c = np.cos(psi)
    if np.any(np.abs(c) < TURNING_EPS):
        raise SingularError("meridional Laplacian undefined at a turning point (cos psi = 0)")
    return c * c * f_pp + (c / rho) * (c - rho * psi_p * np.sin(psi)) * f_p


def laplacian_parametric(rho, psi, f_s, f_ss):
    """Laplace-Beltrami operator in the arc-length chart: ``f_ss + (cos psi / rho) f_s``."""
    _check_rho(rho)
    return f_ss + np.cos(psi) / rho * f_s


def mean_curvature_derivatives(point: ParametricPoint):
    """``(H, dH/ds, d2H/ds2)`` from the exact psi-jets of a parametric point."""
    rho, psi = point.rho, point.psi
    w1, w2, w3 = point.psi_dot, point.psi_ddot, point.psi_dddot
    _check_rho(rho)
    s, c = np.sin(psi), np.cos(psi)
    # u = sin(psi)/rho and its s-derivatives (rho_s = cos psi)
    u = s / rho
    u1 = c * w1 / rho - s * c / rho**2
    # w = psi_dot/rho - sin(psi)/rho^2 so that u1 = c * w
    w = w1 / rho - s / rho**2
    w_s = w2 / rho - 2.0 * w1 * c / rho**2 + 2.0 * s * c / rho**3
    u2 = -s * w1 * w + c * w_s
    H = -0.5 * (w1 + u)
    H_s = -0.5 * (w2 + u1)
    H_ss = -0.5 * (w3 + u2)
    return H, H_s, H_ss


def rho_jet_to_parametric(rho, psi, psi_p, psi_pp, psi_ppp=None, z=0.0, s=0.0) -> ParametricPoint:
    """Convert rho-derivatives of psi to arc-length derivatives (d/ds = cos psi d/drho)."""
    c, sn = np.cos(psi), np.sin(psi)
    w1 = c * psi_p
    w2 = c * (c * psi_pp - sn * psi_p**2)
    if psi_ppp is None:
        w3 = np.nan
    else:
        # d/drho of (c^2 psi_pp - c s psi_p^2)
        d = (
            -2 * c * sn * psi_p * psi_pp
            + c * c * psi_ppp
            - (c * c - sn * sn) * psi_p**3
            - 2 * c * sn * psi_p * psi_pp
        )
        w3 = c * d
    return ParametricPoint(s=s, rho=rho, z=z, psi=psi, psi_dot=w1, psi_ddot=w2, psi_dddot=w3)


def _hermite_increments(t, f, fp):
    """Per-interval integrals of f using endpoint derivatives (4th order, local)."""
    h = np.diff(t)
    return 0.5 * h * (f[:-1] + f[1:]) + h * h / 12.0 * (fp[:-1] - fp[1:])


def accumulate_z(profile: Profile, offset: float = 0.0) -> Profile:
    """Return a copy of ``profile`` with ``z`` filled by quadrature of dz.

    rho-chart: ``dz = tan psi drho``; parametric chart: ``dz = sin psi ds``.
    The integrand derivative is taken from ``dpsi``, which makes the rule
    fourth-order and exactly additive over concatenated sub-profiles.
    """
    if len(profile) < 2:
        raise DomainError("accumulate_z needs at least two points")
    psi, dpsi = profile.psi, profile.dpsi
    if profile.chart == "rho":
        c = np.cos(psi)
        if np.any(np.abs(c) < TURNING_EPS):
            raise SingularError("tan(psi) unbounded: rho-chart profile reaches a turning point")
        f = np.tan(psi)
        fp = dpsi / (c * c)
    elif profile.chart == "parametric":
        f = np.sin(psi)
        fp = np.cos(psi) * dpsi
    else:
        raise DomainError("accumulate_z supports rho and parametric charts; psi-chart z comes from its quadrature")
    z = offset + np.concatenate(([0.0], np.cumsum(_hermite_increments(profile.t, f, fp))))
    return dataclasses.replace(profile, z=z)
