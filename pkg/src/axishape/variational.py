"""Lagrangian formulation of the reduced shape equation.

The Lagrangian has the form ``L = alpha psi'^2 / 2 + beta psi' + gamma`` with
coefficients depending on ``(rho, psi)``.  In the canonical gauge
``alpha = rho cos psi``, ``beta = 0`` and ``gamma = -V``.  This module also
provides Noether symmetry tests and charges, and the Hamiltonian and
Hamilton-Jacobi pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, SingularError
from .geometry import TURNING_EPS, ModelParams, State
from .shape_eq import Jet2

FD_REL_STEP = 1e-6


def _check_cos(psi, obj=None):
    c = np.cos(psi)
    if np.any(np.abs(c) < TURNING_EPS):
        raise SingularError("cos(psi) = 0", obj)
    return c


def _check_rho(rho):
    if np.any(np.asarray(rho) <= 0):
        raise DomainError("rho must be positive")


def _V_parts(rho, psi, params: ModelParams):
    """V, V_rho, V_psi."""
    c0, lt, pt, om = params.c0, params.lambda_t, params.p_t, params.omega0
    c = np.cos(psi)
    s = np.sin(psi)
    t = s / c
    a = c0 + om - 0.5 * pt * rho**2
    V = -t * s / (2 * rho) - c0 * psi - lt * rho / c + a * t
    V_rho = t * s / (2 * rho**2) - lt / c - pt * rho * t
    V_psi = -(s / c**2 + s) / (2 * rho) - c0 - lt * rho * s / c**2 + a / c**2
    return V, V_rho, V_psi


def potential(state: State, params: ModelParams):
    """``V = -tan(psi) sin(psi)/(2 rho) - c0 psi - lt rho sec(psi) + (c0 + om - pt rho^2/2) tan(psi)``."""
    _check_rho(state.rho)
    _check_cos(state.psi, state)
    return _V_parts(state.rho, state.psi, params)[0]


def lagrangian(state: State, params: ModelParams):
    c = _check_cos(state.psi, state)
    _check_rho(state.rho)
    return 0.5 * state.rho * c * state.psi_p**2 - _V_parts(state.rho, state.psi, params)[0]


def momentum(state: State):
    """``dL/dpsi' = rho cos(psi) psi'``."""
    return state.rho * np.cos(state.psi) * state.psi_p


def el_residual(jet: Jet2, params: ModelParams):
    """``dL/dpsi - d/drho(dL/dpsi')`` along the jet (canonical gauge)."""
    c = _check_cos(jet.psi, jet)
    _check_rho(jet.rho)
    rho, psi, q = jet.rho, jet.psi, jet.psi_p
    s = np.sin(psi)
    V_psi = _V_parts(rho, psi, params)[2]
    # alpha = rho c: alpha_psi = -rho s, alpha_rho = c
    return 0.5 * rho * s * q * q - c * q - rho * c * jet.psi_pp - V_psi


# --------------------------------------------------------------------------
# General quadratic Lagrangians and gauge equivalence


Coeff = Callable[[Any, Any], tuple]


@dataclass(frozen=True)
class Lagrangian:
    """``L = alpha psi'^2/2 + beta psi' + gamma``.

    Each coefficient callable maps ``(rho, psi)`` to ``(value, d/drho, d/dpsi)``.
    """

    alpha: Coeff
    beta: Coeff
    gamma: Coeff

    def value(self, state: State):
        a = self.alpha(state.rho, state.psi)[0]
        b = self.beta(state.rho, state.psi)[0]
        g = self.gamma(state.rho, state.psi)[0]
        q = state.psi_p
        return 0.5 * a * q * q + b * q + g

    def el_residual(self, jet: Jet2):
        a, a_r, a_p = self.alpha(jet.rho, jet.psi)
        _, b_r, _ = self.beta(jet.rho, jet.psi)
        _, _, g_p = self.gamma(jet.rho, jet.psi)
        q = jet.psi_p
        return -0.5 * a_p * q * q - a_r * q - a * jet.psi_pp - b_r + g_p


def canonical_lagrangian(params: ModelParams) -> Lagrangian:
    def alpha(rho, psi):
        c = _check_cos(psi)
        return rho * c, c, -rho * np.sin(psi)

    def beta(rho, psi):
        z = np.zeros(np.broadcast(rho, psi).shape)
        return z, z, z

    def gamma(rho, psi):
        _check_cos(psi)
        V, V_r, V_p = _V_parts(rho, psi, params)
        return -V, -V_r, -V_p

    return Lagrangian(alpha, beta, gamma)


def _fd(f, x, i, args):
    """Central difference of ``f(*args)`` in argument ``i`` at relative step."""
    h = FD_REL_STEP * max(abs(float(np.max(np.abs(x)))), 1.0)
    up = list(args)
    dn = list(args)
    up[i] = x + h
    dn[i] = x - h
    return (f(*up) - f(*dn)) / (2 * h)


@dataclass(frozen=True)
class GaugeFunction:
    """Scalar ``Phi(rho, psi)``; derivatives default to central differences.

    ``derivs`` may supply any of ``rho``, ``psi``, ``rho_rho``, ``rho_psi``,
    ``psi_psi`` as callables of ``(rho, psi)``.
    """

    phi: Callable
    derivs: dict = field(default_factory=dict)

    def d(self, which: str, rho, psi):
        if which in self.derivs:
            return self.derivs[which](rho, psi) + 0.0 * (rho + psi)
        if which == "rho":
            return _fd(self.phi, rho, 0, (rho, psi))
        if which == "psi":
            return _fd(self.phi, psi, 1, (rho, psi))
        if which == "rho_rho":
            return _fd(lambda r, p: self.d("rho", r, p), rho, 0, (rho, psi))
        if which == "psi_psi":
            return _fd(lambda r, p: self.d("psi", r, p), psi, 1, (rho, psi))
        if which == "rho_psi":
            return _fd(lambda r, p: self.d("rho", r, p), psi, 1, (rho, psi))
        raise KeyError(which)


def gauge_transform(lag: Lagrangian, phi: GaugeFunction) -> Lagrangian:
    """Lagrangian differing from ``lag`` by ``-dPhi/drho``:
    ``beta -> beta - Phi_psi``, ``gamma -> gamma - Phi_rho``."""

    def beta(rho, psi):
        b, b_r, b_p = lag.beta(rho, psi)
        return (b - phi.d("psi", rho, psi), b_r - phi.d("rho_psi", rho, psi),
                b_p - phi.d("psi_psi", rho, psi))

    def gamma(rho, psi):
        g, g_r, g_p = lag.gamma(rho, psi)
        return (g - phi.d("rho", rho, psi), g_r - phi.d("rho_rho", rho, psi),
                g_p - phi.d("rho_psi", rho, psi))

    return Lagrangian(lag.alpha, beta, gamma)


# --------------------------------------------------------------------------
# Noether symmetries

_FIELDS = ("xi", "eta", "B", "F")
_VARS = ("rho", "psi", "psip")


def _zero(rho, psi, psi_p):
    return 0.0 * (rho + psi + psi_p)


@dataclass(frozen=True)
class Generator:
    """Symmetry candidate ``X = xi d/drho + eta d/dpsi`` with gauge term ``B``
    and multiplier ``F``; each field is a callable of ``(rho, psi, psi')``.

    ``partials`` may map names such as ``"xi_rho"`` or ``"B_psip"`` to
    callables; anything missing is differentiated numerically.
    """

    xi: Callable = _zero
    eta: Callable = _zero
    B: Callable = _zero
    F: Callable = _zero
    partials: dict = field(default_factory=dict)

    def partial(self, name: str, var: str, rho, psi, psi_p):
        key = f"{name}_{var}"
        if key in self.partials:
            return self.partials[key](rho, psi, psi_p) + _zero(rho, psi, psi_p)
        f = getattr(self, name)
        i = _VARS.index(var)
        args = (rho, psi, psi_p)
        return _fd(f, args[i], i, args)


def dilation_generator() -> Generator:
    """``xi = 2 rho``, ``eta = B = F = 0`` with exact partials."""
    zero = _zero
    partials = {f"{n}_{v}": zero for n in _FIELDS for v in _VARS}
    partials["xi_rho"] = lambda r, p, q: 2.0 + zero(r, p, q)
    return Generator(xi=lambda r, p, q: 2.0 * r + zero(r, p, q), partials=partials)


def noether_residual(gen: Generator, jet: Jet2, params: ModelParams):
    """Divergence condition for ``L = rho cos(psi) psi'^2/2 - V`` with
    ``(psi, psi', psi'')`` treated as independent; equals
    ``2 [X(L) + L D(xi) - F EL - D(B)]``."""
    rho, psi, q, q2 = jet.rho, jet.psi, jet.psi_p, jet.psi_pp
    c = _check_cos(psi, jet)
    _check_rho(rho)
    s = np.sin(psi)
    V, V_r, V_p = _V_parts(rho, psi, params)
    P = lambda n, v: gen.partial(n, v, rho, psi, q)  # noqa: E731
    xi = gen.xi(rho, psi, q)
    eta = gen.eta(rho, psi, q)
    F = gen.F(rho, psi, q)
    xi_r, xi_p, xi_q = P("xi", "rho"), P("xi", "psi"), P("xi", "psip")
    eta_r, eta_p, eta_q = P("eta", "rho"), P("eta", "psi"), P("eta", "psip")
    B_r, B_p, B_q = P("B", "rho"), P("B", "psi"), P("B", "psip")
    rc = rho * c
    coef2 = 2 * rc * F - 2 * B_q - (rho * q * q * c + 2 * V) * xi_q + 2 * rc * q * eta_q
    return (
        coef2 * q2
        - rc * xi_p * q**3
        + (c * (xi - rho * xi_r + 2 * rho * eta_p) - rho * s * (F + eta)) * q * q
        + 2 * (c * (F + rho * eta_r) - B_p - V * xi_p) * q
        - 2 * xi * V_r
        + 2 * (F - eta) * V_p
        - 2 * B_r
        - 2 * V * xi_r
    )


def noether_charge(gen: Generator, state: State, params: ModelParams):
    """``xi L + (eta - xi psi') dL/dpsi' - B``."""
    rho, psi, q = state.rho, state.psi, state.psi_p
    L = lagrangian(state, params)
    xi = gen.xi(rho, psi, q)
    return xi * L + (gen.eta(rho, psi, q) - xi * q) * momentum(state) - gen.B(rho, psi, q)


# --------------------------------------------------------------------------
# Hamiltonian and Hamilton-Jacobi


def hamiltonian(state: State, params: ModelParams):
    """``(p, H)`` with ``p = rho cos(psi) psi'`` and ``H = p^2/(2 rho cos psi) + V``."""
    c = _check_cos(state.psi, state)
    _check_rho(state.rho)
    p = state.rho * c * state.psi_p
    return p, p * p / (2 * state.rho * c) + _V_parts(state.rho, state.psi, params)[0]


def hamilton_rhs(rho, psi, p, params: ModelParams):
    """``(dpsi/drho, dp/drho) = (dH/dp, -dH/dpsi)``."""
    c = np.cos(psi)
    V_p = _V_parts(rho, psi, params)[2]
    return p / (rho * c), -(p * p * np.sin(psi) / (2 * rho * c * c) + V_p)


def hamilton_flow(initial: State, rho_span, params: ModelParams, rtol: float = 1e-12, atol: float = 1e-12):
    """Integrate Hamilton's equations with an 8th-order Runge-Kutta (scipy DOP853).

    Returns the ``OdeSolution`` of ``(psi, p)`` over ``rho``.
    """
    c = _check_cos(initial.psi, initial)
    p0 = initial.rho * c * initial.psi_p

    def f(r, y):
        return hamilton_rhs(r, y[0], y[1], params)

    sol = solve_ivp(f, (float(rho_span[0]), float(rho_span[1])), [float(initial.psi), float(p0)],
                    method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise ArithmeticError(sol.message)
    return sol.sol


def hj_general(S_rho, S_psi, rho, psi, params: ModelParams):
    """``S_rho + H(rho, psi, S_psi)`` for user-supplied derivatives of S."""
    c = _check_cos(psi)
    return S_rho + S_psi**2 / (2 * rho * c) + _V_parts(rho, psi, params)[0]


def _sqrt_g(Ip, psi):
    g = Ip * np.cos(psi) + np.sin(psi) ** 2
    if np.any(g < -1e-14):
        raise DomainError("negative radicand I' cos psi + sin^2 psi")
    return np.sqrt(np.maximum(g, 0.0))


def _check_sign(sign):
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")


def hj_momentum(Ip, rho, psi, sign: int):
    """``S_psi`` of the separated action; equals the momentum on the branch ``sign``."""
    _check_sign(sign)
    return -sign * _sqrt_g(Ip, psi) + 0.0 * rho


def hj_residual(Ip, rho, psi, sign: int):
    """Willmore Hamilton-Jacobi equation evaluated on the separated action
    ``S = -sign int sqrt(I' cos + sin^2) dpsi - (I'/2) ln rho``."""
    _check_sign(sign)
    _check_rho(rho)
    c = _check_cos(psi)
    S_rho = -Ip / (2 * rho)
    S_psi = hj_momentum(Ip, rho, psi, sign)
    return S_rho + S_psi**2 / (2 * rho * c) - np.tan(psi) * np.sin(psi) / (2 * rho)


def conjugate_time(Ip, psi, rho, sign: int):
    """``J = dS/dI' = (-sign E(psi) - ln rho)/2`` with ``E`` based at pi/2.

    Constant (``= -ln(rho0)/2``) along the quadrature solution on branch ``sign``.
    """
    from .willmore import _check_range, exponent

    _check_sign(sign)
    psi = np.atleast_1d(np.asarray(psi, dtype=float))
    rho = np.broadcast_to(np.asarray(rho, dtype=float), psi.shape)
    _check_rho(rho)
    _check_range(Ip, float(psi.min()), float(psi.max()))
    E = np.array([exponent(Ip, np.pi / 2, p) for p in psi])
    return 0.5 * (-sign * E - np.log(rho))
