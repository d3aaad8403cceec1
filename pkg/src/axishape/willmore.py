"""Conformal first integral of the axisymmetric Willmore equation and its
quadrature solution.

Branch labels: ``sign = -1`` is the branch with ``rho <= rho0`` (the sphere
at I = 0), ``sign = +1`` the branch with ``rho >= rho0`` (the catenoid).
The same label is used in the first-order form
``rho cos(psi) psi' + sign * sqrt(I cos psi + sin^2 psi) = 0``.
The quadrature is based at psi = pi/2, where the radicand equals 1 for
every I, so that ``rho = rho0 * exp(-sign * E(psi))`` with
``E(psi) = int_{pi/2}^{psi} cos / sqrt(I cos + sin^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, SingularError
from .geometry import TURNING_EPS, ModelParams, Profile, State

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-12
_RADICAND_SLACK = 1e-14


def first_integral(state: State):
    """``I = rho^2 cos(psi) psi'^2 - sin^2(psi)/cos(psi)``."""
    c = np.cos(state.psi)
    if np.any(np.abs(c) < TURNING_EPS):
        raise SingularError("first integral undefined at cos(psi) = 0", state)
    return state.rho**2 * c * state.psi_p**2 - np.sin(state.psi) ** 2 / c


def radicand(I, psi):
    return I * np.cos(psi) + np.sin(psi) ** 2


@dataclass(frozen=True)
class BranchDomain:
    """Admissible psi-interval (containing pi/2) where the radicand is non-negative."""

    I: float
    psi_lo: float
    psi_hi: float
    roots: tuple = ()

    @property
    def empty(self) -> bool:
        return not self.psi_lo < self.psi_hi

    def contains(self, psi) -> bool:
        psi = np.asarray(psi)
        return bool(np.all((psi >= self.psi_lo) & (psi <= self.psi_hi)))


def branch_domain(I: float, xtol: float = 1e-15) -> BranchDomain:
    """Isolate the sign changes of ``I cos psi + sin^2 psi`` on (-pi, pi] by
    bisection and return the admissible interval around pi/2.

    At I = 0 the radicand touches zero at psi = 0 and pi without changing
    sign; those points are excluded (open interval (0, pi)).
    """
    I = float(I)
    grid = np.linspace(-np.pi, np.pi, 2049)
    g = radicand(I, grid)
    roots = []
    for a, b, ga, gb in zip(grid[:-1], grid[1:], g[:-1], g[1:]):
        if ga == 0.0 and I != 0.0:
            roots.append(float(a))
        elif ga * gb < 0:
            roots.append(float(optimize.bisect(lambda x: radicand(I, x), a, b, xtol=xtol, maxiter=200)))
    if I == 0.0:
        return BranchDomain(I, 0.0, float(np.pi), ())
    roots = sorted(set(roots))
    if radicand(I, np.pi / 2) <= 0:
        return BranchDomain(I, 0.0, 0.0, tuple(roots))
    lo = max([r for r in roots if r < np.pi / 2], default=-np.pi)
    hi = min([r for r in roots if r > np.pi / 2], default=np.pi)
    if I > 0 and lo == -np.pi:
        lo = -hi
    return BranchDomain(I, lo, hi, tuple(roots))


def _check_range(I, psi_a, psi_b):
    dom = branch_domain(I)
    lo, hi = min(psi_a, psi_b), max(psi_a, psi_b)
    if dom.empty or lo < dom.psi_lo or hi > dom.psi_hi:
        raise DomainError(
            f"psi range [{lo}, {hi}] leaves the branch domain [{dom.psi_lo}, {dom.psi_hi}] for I={I}"
        )
    if I == 0 and (lo <= 0.0 or hi >= np.pi):
        raise DomainError("for I = 0 the psi range must stay inside (0, pi)")
    return dom


def _sqrt_radicand(I, psi):
    g = radicand(I, psi)
    if np.any(g < -_RADICAND_SLACK):
        raise DomainError(f"negative radicand I cos psi + sin^2 psi at psi={psi}")
    return np.sqrt(np.maximum(g, 0.0))


def _exp_integrand(psi, I):
    return np.cos(psi) / _sqrt_radicand(I, psi)


def exponent(I: float, psi_a: float, psi_b: float) -> float:
    """``int_{psi_a}^{psi_b} cos / sqrt(I cos + sin^2) dpsi`` by adaptive Gauss-Kronrod."""
    if psi_a == psi_b:
        return 0.0
    val, _ = integrate.quad(_exp_integrand, psi_a, psi_b, args=(I,),
                            epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
    return val


def quadrature_rho(I: float, rho0: float, sign: int, psi):
    """rho(psi) on the quadrature branch ``sign`` (pointwise, base at pi/2)."""
    _check_sign(sign)
    psi = np.atleast_1d(np.asarray(psi, dtype=float))
    _check_range(I, float(psi.min()), float(psi.max()))
    E = np.array([exponent(I, np.pi / 2, p) for p in psi])
    return rho0 * np.exp(-sign * E)


def _check_sign(sign):
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")


def quadrature_profile(I: float, rho0: float, sign: int, psi_range, n: int = 200) -> Profile:
    """psi-chart profile from the quadrature solution of the first integral.

    ``dpsi`` holds d(psi)/d(rho) (NaN at cos psi = 0); ``z`` is accumulated
    from ``dz/dpsi = -sign rho sin psi / sqrt(I cos psi + sin^2 psi)`` with
    z = 0 at the first point.
    """
    _check_sign(sign)
    if n < 2:
        raise DomainError("need n >= 2")
    psi_a, psi_b = float(psi_range[0]), float(psi_range[1])
    if psi_a == psi_b:
        raise DomainError("empty psi range")
    _check_range(I, psi_a, psi_b)
    psi = np.linspace(psi_a, psi_b, n)
    E = np.empty(n)
    E[0] = exponent(I, np.pi / 2, psi[0])
    for i in range(1, n):
        E[i] = E[i - 1] + exponent(I, psi[i - 1], psi[i])
    rho = rho0 * np.exp(-sign * E)

    z = np.zeros(n)
    for i in range(1, n):
        a, Ea = psi[i - 1], E[i - 1]

        def dz(p, a=a, Ea=Ea):
            r = rho0 * np.exp(-sign * (Ea + exponent(I, a, p)))
            return -sign * r * np.sin(p) / _sqrt_radicand(I, p)

        z[i] = z[i - 1] + integrate.quad(dz, a, psi[i], epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)[0]

    c = np.cos(psi)
    sq = _sqrt_radicand(I, psi)
    with np.errstate(divide="ignore", invalid="ignore"):
        dpsi = np.where(np.abs(c) < TURNING_EPS, np.nan, -sign * sq / (rho * c))
    ok = np.isfinite(dpsi)
    Ivals = np.full(n, np.nan)
    Ivals[ok] = first_integral(State(rho[ok], psi[ok], dpsi[ok]))
    from .stress import scale_charge_closed

    Q = np.full(n, np.nan)
    Q[ok] = scale_charge_closed(State(rho[ok], psi[ok], dpsi[ok], z[ok]), 0.0).Q
    return Profile(
        chart="psi", t=psi, rho=rho, psi=psi, dpsi=dpsi, z=z, params=ModelParams(),
        branch_sign=sign, rho0=rho0, I=Ivals, omega_eff=np.where(ok, 0.0, np.nan), Q_scale=Q,
        stats={"I": I, "n": n},
    )


def residual_eq30(state: State, I: float, sign: int):
    """``rho cos(psi) psi' + sign * sqrt(I cos psi + sin^2 psi)``."""
    _check_sign(sign)
    return state.rho * np.cos(state.psi) * state.psi_p + sign * _sqrt_radicand(I, state.psi)


def residual_eq31(rho, z_p, z_pp, I: float, sign: int):
    """Graph form: ``z'' - sign (z'^2 + 1) sqrt(z'^2 + I sqrt(z'^2 + 1)) / rho``.

    For ``z' > 0`` the graph sign equals minus the branch label of
    :func:`residual_eq30`.
    """
    _check_sign(sign)
    w = z_p**2 + 1
    inner = z_p**2 + I * np.sqrt(w)
    if np.any(inner < -_RADICAND_SLACK):
        raise DomainError("negative inner radicand in the graph form")
    return z_pp - sign * w * np.sqrt(np.maximum(inner, 0.0)) / rho
