"""Residuals of the shape equation in its three forms, and integration of the
reduced second-order equation in the rho-chart."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import _backend, _dopri
from .errors import DomainError, SingularError, StepSizeError
from .geometry import (
    TURNING_EPS,
    ModelParams,
    Profile,
    State,
    curvatures,
    laplacian_meridional,
)


@dataclass(frozen=True)
class Jet2:
    rho: Any
    psi: Any
    psi_p: Any
    psi_pp: Any


@dataclass(frozen=True)
class Jet3:
    rho: Any
    psi: Any
    psi_p: Any
    psi_pp: Any
    psi_ppp: Any


def _check_chart(rho, psi, state=None):
    if np.any(np.asarray(rho) <= 0):
        raise SingularError("rho must be positive", state)
    if np.any(np.abs(np.cos(psi)) < TURNING_EPS):
        raise SingularError("cos(psi) = 0: rho-chart invalid at a turning point", state)


def residual_general(two_H, K, lap_H, params: ModelParams):
    """Left side of the general shape equation
    ``2 kc lap H + kc (2H + c0)(2H^2 - 2K - c0 H) - 2 lam H + p``."""
    kc, c0 = params.kc, params.c0
    H = 0.5 * two_H
    return 2 * kc * lap_H + kc * (two_H + c0) * (2 * H * H - 2 * K - c0 * H) - 2 * params.lam * H + params.p


def _g_derivs(rho, psi, q, q2, q3):
    """g = (rho sin psi)'/rho = -2H and its first two rho-derivatives."""
    s, c = np.sin(psi), np.cos(psi)
    g = q * c + s / rho
    g1 = q2 * c - q * q * s + q * c / rho - s / rho**2
    g2 = (
        q3 * c
        - 3 * q * q2 * s
        - q**3 * c
        + (q2 * c - q * q * s) / rho
        - 2 * q * c / rho**2
        + 2 * s / rho**3
    )
    return g, g1, g2


def residual_eq7(jet: Jet3, params: ModelParams):
    """Left side of the third-order axisymmetric equation (divided by kc)."""
    rho, psi, q = jet.rho, jet.psi, jet.psi_p
    _check_chart(rho, psi, jet)
    s, c = np.sin(psi), np.cos(psi)
    g, g1, g2 = _g_derivs(rho, psi, q, jet.psi_pp, jet.psi_ppp)
    # -(c/rho) {rho c g'}'
    lap_term = -(c * c * g2 + (c / rho) * (c - rho * q * s) * g1)
    sin2_p = 2 * s * c * q
    return (
        lap_term
        - 0.5 * g**3
        + (rho * g) * sin2_p / rho**2
        - params.c0 * sin2_p / rho
        + params.lambda_t * g
        + params.p_t
    )


def residual_eq7_via_general(jet: Jet3, params: ModelParams):
    """Third-order residual assembled from the geometry module and the general residual."""
    state = State(jet.rho, jet.psi, jet.psi_p)
    two_H, K = curvatures(state)
    _, g1, g2 = _g_derivs(jet.rho, jet.psi, jet.psi_p, jet.psi_pp, jet.psi_ppp)
    lap_H = laplacian_meridional(jet.rho, jet.psi, jet.psi_p, -0.5 * g1, -0.5 * g2)
    return residual_general(two_H, K, lap_H, params) / params.kc


def _eq8_rest(rho, psi, q, params: ModelParams, omega0=None):
    s, c = np.sin(psi), np.cos(psi)
    om = params.omega0 if omega0 is None else omega0
    return (
        -0.5 * rho * c * c * s * q * q
        + c**3 * q
        + s**3 / (2 * rho)
        + params.c0 * s * s
        - (params.lambda_t * rho**2 + 1) * s / rho
        - 0.5 * params.p_t * rho**2
        + om
    )


def residual_eq8(jet: Jet2, params: ModelParams):
    """Left side of the reduced second-order equation."""
    if np.any(np.asarray(jet.rho) <= 0):
        raise DomainError("rho must be positive")
    c = np.cos(jet.psi)
    return jet.rho * c**3 * jet.psi_pp + _eq8_rest(jet.rho, jet.psi, jet.psi_p, params)


def solve_psi_pp(state: State, params: ModelParams):
    """The psi'' that makes :func:`residual_eq8` vanish."""
    rho, psi = state.rho, state.psi
    c = np.cos(psi)
    if np.any(np.abs(c) < TURNING_EPS) or np.any(np.asarray(rho) < 1e-12):
        raise SingularError("rho cos^3(psi) vanishes: cannot solve for psi''", state)
    return -_eq8_rest(rho, psi, state.psi_p, params) / (rho * c**3)


def omega_effective(jet: Jet2, params: ModelParams):
    """The value of omega0 for which :func:`residual_eq8` vanishes at ``jet``.

    ``params.omega0`` is ignored.
    """
    if np.any(np.asarray(jet.rho) <= 0):
        raise DomainError("rho must be positive")
    c = np.cos(jet.psi)
    return -(jet.rho * c**3 * jet.psi_pp + _eq8_rest(jet.rho, jet.psi, jet.psi_p, params, omega0=0.0))


class DenseOutput:
    """Piecewise quartic interpolant of ``(psi, psi', z)`` over accepted steps."""

    def __init__(self, nodes, ys, ks):
        self.nodes = np.asarray(nodes, dtype=float)
        self.h = np.diff(self.nodes)
        self.ys = ys
        n = len(self.h)
        self.rcont = np.empty((n, 5, 3))
        for i in range(n):
            h = self.h[i]
            k = ks[i]
            y0, y1 = ys[i], ys[i + 1]
            ydiff = y1 - y0
            bspl = h * k[0] - ydiff
            self.rcont[i, 0] = y0
            self.rcont[i, 1] = ydiff
            self.rcont[i, 2] = bspl
            self.rcont[i, 3] = ydiff - h * k[6] - bspl
            self.rcont[i, 4] = h * (
                _dopri.D1 * k[0] + _dopri.D3 * k[2] + _dopri.D4 * k[3]
                + _dopri.D5 * k[4] + _dopri.D6 * k[5] + _dopri.D7 * k[6]
            )

    def _locate(self, rho):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        lo, hi = min(self.nodes[0], self.nodes[-1]), max(self.nodes[0], self.nodes[-1])
        tol = 1e-12 * max(1.0, abs(hi))
        if np.any(rho < lo - tol) or np.any(rho > hi + tol):
            raise DomainError("dense output evaluated outside the integrated span")
        if self.nodes[-1] >= self.nodes[0]:
            idx = np.searchsorted(self.nodes, rho, side="right") - 1
        else:
            idx = len(self.nodes) - 1 - np.searchsorted(self.nodes[::-1], rho, side="left")
        idx = np.clip(idx, 0, len(self.h) - 1)
        theta = (rho - self.nodes[idx]) / self.h[idx]
        return idx, theta

    def __call__(self, rho):
        """Interpolated ``(psi, psi', z)``; shape ``(..., 3)``."""
        scalar = np.ndim(rho) == 0
        idx, th = self._locate(rho)
        r = self.rcont[idx]
        th = th[:, None]
        th1 = 1.0 - th
        out = r[:, 0] + th * (r[:, 1] + th1 * (r[:, 2] + th * (r[:, 3] + th1 * r[:, 4])))
        return out[0] if scalar else out

    def derivative(self, rho):
        """d/drho of the interpolant; shape ``(..., 3)``."""
        scalar = np.ndim(rho) == 0
        idx, th = self._locate(rho)
        r = self.rcont[idx]
        h = self.h[idx][:, None]
        th = th[:, None]
        th1 = 1.0 - th
        d = (
            r[:, 1]
            + (1 - 2 * th) * r[:, 2]
            + (2 * th - 3 * th * th) * r[:, 3]
            + (2 * th * th1 * th1 - 2 * th * th * th1) * r[:, 4]
        ) / h
        return d[0] if scalar else d


_COLLAPSE_NEAR_TURNING = 1e-4


def _refine_turning(dense: DenseOutput, a, b, cos_eps, sgn0, xtol=1e-10):
    """Bisection on the last step for the point where sgn0*cos(psi) = cos_eps."""
    def f(r):
        return sgn0 * np.cos(dense(r)[0]) - cos_eps

    fa = f(a)
    if fa <= 0:
        return a
    while abs(b - a) > xtol:
        m = 0.5 * (a + b)
        if f(m) > 0:
            a = m
        else:
            b = m
    # keep the side where the chart is still valid
    return a


def integrate(
    initial: State,
    rho_span,
    params: ModelParams,
    tol: float = 1e-10,
    *,
    cos_eps: float = 1e-6,
    axis_eps: float = 1e-9,
    max_steps: int = 1_000_000,
    fixed_step: float | None = None,
    backend: str | None = None,
) -> Profile:
    """Integrate the reduced shape equation for ``(psi, psi', z)`` over rho.

    Adaptive Dormand-Prince 5(4) with local error control ``tol`` (used as
    both relative and absolute tolerance).  Integration stops early at a
    turning point (``|cos psi| < cos_eps``, located by bisection on the dense
    output to 1e-10 in rho) or at the axis (``rho < axis_eps``).
    ``fixed_step`` disables error control and uses a constant step.
    """
    rho_a, rho_b = float(rho_span[0]), float(rho_span[1])
    if not rho_a == float(initial.rho):
        raise DomainError("rho_span must start at initial.rho")
    if rho_a <= 0:
        raise DomainError("initial rho must be positive")
    if abs(np.cos(initial.psi)) < cos_eps:
        raise SingularError("initial state at a turning point", initial)
    termination = "span-end"
    if rho_b < axis_eps:
        rho_b = axis_eps
        termination = "axis"
    kparams = (params.c0, params.lambda_t, params.p_t, params.omega0)
    y0 = (float(initial.psi), float(initial.psi_p), float(initial.z))
    rhos, ys, ks, status, nfev, nrej = _backend.dopri5_eq8(
        rho_a, rho_b, y0, kparams, tol, tol, 0.0, max_steps, cos_eps,
        0.0 if fixed_step is None else float(fixed_step), backend=backend,
    )
    if status == 5:
        raise SingularError("non-finite derivative at the initial state", initial)
    if status == 3 and abs(np.cos(ys[-1, 0])) < _COLLAPSE_NEAR_TURNING:
        # psi' ~ (rho* - rho)^(-1/2) beats the step floor just short of the
        # vertical tangent; the last accepted node is the turning point
        status = 2
    if status in (3, 4):
        last = State(rhos[-1], ys[-1, 0], ys[-1, 1], ys[-1, 2])
        why = "step size collapsed" if status == 3 else "max_steps exhausted"
        raise StepSizeError(f"{why} at rho={rhos[-1]!r}", last_state=last, rho=rhos[-1])

    dense = DenseOutput(rhos, ys, ks) if len(rhos) > 1 else None
    if status == 1:
        sgn0 = 1.0 if np.cos(initial.psi) >= 0 else -1.0
        r_ev = _refine_turning(dense, rhos[-2], rhos[-1], cos_eps, sgn0)
        # re-integrate the last segment up to the located point: the quartic
        # interpolant is too coarse there because psi' grows like 1/cos psi
        rhos, ys, ks = rhos[:-1], ys[:-1], ks[:-1]
        if r_ev != rhos[-1]:
            sub = _backend.dopri5_eq8(
                rhos[-1], r_ev, tuple(ys[-1]), kparams, tol, tol, 0.0, max_steps, 0.0,
                0.0 if fixed_step is None else float(fixed_step), backend=backend,
            )
            if sub[3] in (0, 1):
                rhos = np.concatenate((rhos, sub[0][1:]))
                ys = np.concatenate((ys, sub[1][1:]))
                ks = np.concatenate((ks, sub[2])) if len(ks) else np.asarray(sub[2])
                nfev += sub[4]
                nrej += sub[5]
        dense = DenseOutput(rhos, ys, ks) if len(rhos) > 1 else None
        termination = "turning-point"

    elif status == 2:
        termination = "turning-point"

    psi, dpsi, z = ys[:, 0], ys[:, 1], ys[:, 2]
    profile_stats = {"nfev": nfev, "nrej": nrej, "nsteps": len(rhos) - 1,
                     "tol": tol, "backend": backend or _backend.BACKEND, "status": status}
    I, om_eff, Q = _samples(rhos, psi, dpsi, z, params, dense)
    return Profile(
        chart="rho", t=rhos, rho=rhos, psi=psi, dpsi=dpsi, z=z, params=params, rho0=rho_a,
        termination=termination, I=I, omega_eff=om_eff, Q_scale=Q,
        stats=profile_stats, dense=dense,
    )


def _samples(rhos, psi, dpsi, z, params, dense):
    from .stress import scale_charge_closed
    from .willmore import first_integral

    ok = np.abs(np.cos(psi)) >= TURNING_EPS
    I = np.full(len(rhos), np.nan)
    st = State(rhos[ok], psi[ok], dpsi[ok], z[ok])
    I[ok] = first_integral(st)
    om = np.full(len(rhos), np.nan)
    if dense is not None:
        psi_pp = dense.derivative(rhos)[:, 1]
        om[ok] = omega_effective(Jet2(rhos[ok], psi[ok], dpsi[ok], psi_pp[ok]), params)
    Q = np.full(len(rhos), np.nan)
    if params.c0 == 0 and params.lambda_t == 0 and params.p_t == 0:
        Q[ok] = scale_charge_closed(st, params.omega0, params.kc).Q
    return I, om, Q


def psi_pp_along(profile: Profile):
    """psi'' at the profile nodes from the dense-output derivative."""
    if profile.dense is None:
        raise DomainError("profile carries no dense output")
    return profile.dense.derivative(profile.rho)[:, 1]
