"""Membrane stress tensor on axisymmetric surfaces and the dilation charge.

Components are reported in the orthonormal (meridian, parallel, normal)
frame with normal ``n = (-sin psi, cos psi)`` in the meridian plane, the
orientation for which ``K_ab = e_a . d_b n`` reproduces the curvature
convention of :mod:`axishape.geometry`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import SingularError
from .geometry import (
    TURNING_EPS,
    ModelParams,
    ParametricPoint,
    State,
    mean_curvature_derivatives,
    principal_curvatures,
)


@dataclass(frozen=True)
class StressSample:
    f_normal: Any
    f_ss: Any
    f_phiphi: Any
    f_sphi: Any = 0.0


@dataclass(frozen=True)
class ChargeSample:
    rho: Any
    psi: Any
    psi_p: Any
    z: Any
    Q: Any
    Q_alt: Any


def stress_components(point: ParametricPoint, params: ModelParams) -> StressSample:
    """Meridional stress vector components ``f^s`` (tangential, normal) and ``f^{phi phi}``."""
    kc, c0, lam = params.kc, params.c0, params.lam
    k_m, k_p = principal_curvatures(point)
    two_H = k_m + k_p
    _, H_s, _ = mean_curvature_derivatives(point)
    iso = 0.5 * kc * (two_H + c0) ** 2 + lam
    return StressSample(
        f_normal=-2 * kc * H_s,
        f_ss=kc * k_m * (two_H + c0) - iso,
        f_phiphi=kc * k_p * (two_H + c0) - iso,
        f_sphi=np.zeros_like(np.asarray(two_H, dtype=float)),
    )


def scale_charge_closed(state: State, omega0: float, kc: float = 1.0) -> ChargeSample:
    """On-shell ring charge ``2 pi rho f^a . X t_a`` (valid for c0 = lambda = p = 0).

    Both printed forms are evaluated and must agree.
    """
    rho, psi, q, z = state.rho, state.psi, state.psi_p, state.z
    c = np.cos(psi)
    if np.any(np.abs(c) < TURNING_EPS):
        raise SingularError("charge undefined at cos(psi) = 0", state)
    s = np.sin(psi)
    t = s / c
    Q1 = np.pi * kc * (rho**2 * q**2 * c - t * (s - 2 * rho * omega0) - 2 * omega0 * z)
    I = rho**2 * c * q**2 - s**2 / c
    Q2 = np.pi * kc * I + 2 * np.pi * kc * omega0 * (rho * t - z)
    scale = np.pi * kc * (rho**2 * q**2 * np.abs(c) + np.abs(t * s) + 2 * abs(omega0) * (np.abs(rho * t) + np.abs(z)))
    if np.any(np.abs(Q1 - Q2) > 1e-12 * np.maximum(scale, 1.0)):
        raise ArithmeticError("closed forms of the scale charge disagree")
    return ChargeSample(rho, psi, q, z, Q1, Q2)


def scale_charge_direct(point: ParametricPoint, stress: StressSample):
    """``2 pi rho [f^ss (e_s . X) + f_n (n . X)]`` from the stress components."""
    rho, z, psi = point.rho, point.z, point.psi
    c, s = np.cos(psi), np.sin(psi)
    e_dot_X = rho * c + z * s
    n_dot_X = z * c - rho * s
    return 2 * np.pi * rho * (stress.f_ss * e_dot_X + stress.f_normal * n_dot_X)


def stress_divergence(point_fn, t, params: ModelParams, h: float = 1e-4):
    """Tangential and normal parts of ``div f - p n`` at parameter ``t``.

    ``point_fn(t) -> (ParametricPoint, ds/dt)``.  The meridional derivative of
    ``rho f^s`` is taken by a fourth-order central difference in ``t``.
    """
    def ring_force(tt):
        pt, _ = point_fn(tt)
        st = stress_components(pt, params)
        c, s = np.cos(pt.psi), np.sin(pt.psi)
        # f^s in (rho, z) components: f_ss e_s + f_n n
        fr = st.f_ss * c - st.f_normal * s
        fz = st.f_ss * s + st.f_normal * c
        return pt.rho * fr, pt.rho * fz

    pts = [ring_force(t + k * h) for k in (-2, -1, 1, 2)]
    dr = (pts[0][0] - 8 * pts[1][0] + 8 * pts[2][0] - pts[3][0]) / (12 * h)
    dz = (pts[0][1] - 8 * pts[1][1] + 8 * pts[2][1] - pts[3][1]) / (12 * h)
    p0, ds_dt = point_fn(t)
    st = stress_components(p0, params)
    # div f = (1/rho) [d/ds(rho f^s) - f^{phi phi} e_rho]
    div_r = (dr / ds_dt - st.f_phiphi) / p0.rho
    div_z = (dz / ds_dt) / p0.rho
    c, s = np.cos(p0.psi), np.sin(p0.psi)
    n_r, n_z = -s, c
    res_r = div_r - params.p * n_r
    res_z = div_z - params.p * n_z
    tangential = res_r * c + res_z * s
    normal = res_r * n_r + res_z * n_z
    return tangential, normal


def parametric_from_profile(profile) -> ParametricPoint:
    """Arc-length jets at the nodes of a rho-chart profile with dense output."""
    from .geometry import rho_jet_to_parametric
    from .shape_eq import psi_pp_along

    if profile.chart != "rho":
        raise ValueError("expected a rho-chart profile")
    return rho_jet_to_parametric(profile.rho, profile.psi, profile.dpsi, psi_pp_along(profile), z=profile.z)


def scale_charge_along(profile, params: ModelParams | None = None):
    """Direct ring charge at every node of an integrated rho-chart profile."""
    params = profile.params if params is None else params
    pt = parametric_from_profile(profile)
    return scale_charge_direct(pt, stress_components(pt, params))
