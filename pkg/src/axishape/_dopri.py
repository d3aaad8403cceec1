"""Dormand-Prince 5(4) stepping loop for the reduced shape equation (pure Python).

This is the fallback for ``axishape._kernels``; both implement the same
algorithm operation for operation, so their outputs agree to rounding.

State vector ``y = (psi, psi', z)`` in the independent variable rho::

    psi'' = -(-rho/2 cos^2 sin psi'^2 + cos^3 psi' + sin^3/(2 rho) + c0 sin^2
              - (lt rho^2 + 1) sin / rho - pt rho^2 / 2 + om) / (rho cos^3)
    z'    = tan psi

Status codes returned by the kernel:
  0 reached rho_end, 1 |cos psi| dropped below cos_eps (or changed sign)
  during the last accepted step, 3 step size collapsed, 4 max_steps
  exhausted, 5 non-finite initial derivative.
"""

from math import cos, sin, sqrt

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
A71, A73, A74, A75, A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40
# 4th-order continuous extension
D1 = -12715105075 / 11282082432
D3 = 87487479700 / 32700410799
D4 = -10690763975 / 1880347072
D5 = 701980252875 / 199316789632
D6 = -1453857185 / 822651844
D7 = 69997945 / 29380423

SAFETY, FAC_MIN, FAC_MAX = 0.9, 0.2, 10.0
H_MIN_REL = 1e-14


def rhs(r, p, q, c0, lt, pt, om):
    c = cos(p)
    s = sin(p)
    den = r * c * c * c
    if den == 0.0:
        nan = float("nan")
        return q, nan, nan
    rest = (
        -0.5 * r * c * c * s * q * q
        + c * c * c * q
        + s * s * s / (2.0 * r)
        + c0 * s * s
        - (lt * r * r + 1.0) * s / r
        - 0.5 * pt * r * r
        + om
    )
    return q, -rest / den, s / c


def _finite(x):
    return x == x and x - x == 0.0


def dopri5_eq8(rho0, rho_end, y0, params, rtol, atol, h_init, max_steps, cos_eps, fixed_step):
    """Integrate from ``rho0`` towards ``rho_end``.

    Returns ``(rhos, ys, ks, status, nfev, nrej)``: accepted nodes, states,
    the seven stage derivatives of every accepted step (for dense output),
    and counters.
    """
    c0, lt, pt, om = params
    direction = 1.0 if rho_end >= rho0 else -1.0
    span = abs(rho_end - rho0)
    r = rho0
    y = [y0[0], y0[1], y0[2]]
    sgn0 = 1.0 if cos(y[0]) >= 0 else -1.0
    rhos = [r]
    ys = [tuple(y)]
    ks = []
    nfev = 0
    nrej = 0
    k1 = rhs(r, y[0], y[1], c0, lt, pt, om)
    nfev += 1
    if not (_finite(k1[0]) and _finite(k1[1]) and _finite(k1[2])):
        return rhos, ys, ks, 5, nfev, nrej
    if span == 0.0:
        return rhos, ys, ks, 0, nfev, nrej

    if fixed_step > 0:
        h = fixed_step
    elif h_init > 0:
        h = h_init
    else:
        # Hairer's starting-step heuristic
        d0 = 0.0
        d1 = 0.0
        for i in range(3):
            sc = atol + rtol * abs(y[i])
            d0 += (y[i] / sc) ** 2
            d1 += (k1[i] / sc) ** 2
        d0 = sqrt(d0 / 3.0)
        d1 = sqrt(d1 / 3.0)
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        h0 = min(h0, span)
        yt0 = y[0] + direction * h0 * k1[0]
        yt1 = y[1] + direction * h0 * k1[1]
        f = rhs(r + direction * h0, yt0, yt1, c0, lt, pt, om)
        nfev += 1
        d2 = 0.0
        for i in range(3):
            sc = atol + rtol * abs(y[i])
            d2 += ((f[i] - k1[i]) / sc) ** 2
        d2 = sqrt(d2 / 3.0) / h0
        if not _finite(d2):
            h = h0
        elif max(d1, d2) <= 1e-15:
            h = max(1e-6, h0 * 1e-3)
        else:
            h = (0.01 / max(d1, d2)) ** 0.2
        h = min(100.0 * h0, h, span)

    status = 4
    nsteps = 0
    while nsteps < max_steps:
        remaining = abs(rho_end - r)
        last = False
        # absorb a sliver left over by roundoff into this step
        if h >= remaining or remaining - h < 1e-10 * h:
            h = remaining
            last = True
        if h < H_MIN_REL * max(abs(r), 1.0):
            status = 3
            break
        hs = direction * h
        y_0, y_1, y_2 = y
        a1 = k1
        a2 = rhs(r + C2 * hs, y_0 + hs * A21 * a1[0], y_1 + hs * A21 * a1[1], c0, lt, pt, om)
        a3 = rhs(
            r + C3 * hs,
            y_0 + hs * (A31 * a1[0] + A32 * a2[0]),
            y_1 + hs * (A31 * a1[1] + A32 * a2[1]),
            c0, lt, pt, om,
        )
        a4 = rhs(
            r + C4 * hs,
            y_0 + hs * (A41 * a1[0] + A42 * a2[0] + A43 * a3[0]),
            y_1 + hs * (A41 * a1[1] + A42 * a2[1] + A43 * a3[1]),
            c0, lt, pt, om,
        )
        a5 = rhs(
            r + C5 * hs,
            y_0 + hs * (A51 * a1[0] + A52 * a2[0] + A53 * a3[0] + A54 * a4[0]),
            y_1 + hs * (A51 * a1[1] + A52 * a2[1] + A53 * a3[1] + A54 * a4[1]),
            c0, lt, pt, om,
        )
        a6 = rhs(
            r + hs,
            y_0 + hs * (A61 * a1[0] + A62 * a2[0] + A63 * a3[0] + A64 * a4[0] + A65 * a5[0]),
            y_1 + hs * (A61 * a1[1] + A62 * a2[1] + A63 * a3[1] + A64 * a4[1] + A65 * a5[1]),
            c0, lt, pt, om,
        )
        yn = [0.0, 0.0, 0.0]
        for i in range(3):
            yn[i] = y[i] + hs * (
                A71 * a1[i] + A73 * a3[i] + A74 * a4[i] + A75 * a5[i] + A76 * a6[i]
            )
        r_new = rho_end if last else r + hs
        a7 = rhs(r_new, yn[0], yn[1], c0, lt, pt, om)
        nfev += 6

        if fixed_step > 0:
            err = 0.0
        else:
            err = 0.0
            for i in range(3):
                e = hs * (
                    E1 * a1[i] + E3 * a3[i] + E4 * a4[i] + E5 * a5[i] + E6 * a6[i] + E7 * a7[i]
                )
                sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
                err += (e / sc) ** 2
            err = sqrt(err / 3.0)
            if not _finite(err):
                err = 1e300

        if err <= 1.0:
            ks.append((a1, a2, a3, a4, a5, a6, a7))
            r = r_new
            y = yn
            k1 = a7
            rhos.append(r)
            ys.append((yn[0], yn[1], yn[2]))
            nsteps += 1
            c = cos(yn[0])
            if c * sgn0 < cos_eps:
                status = 1
                break
            if last:
                status = 0
                break
            if fixed_step <= 0:
                fac = FAC_MAX if err == 0.0 else min(FAC_MAX, max(FAC_MIN, SAFETY * err ** -0.2))
                h = h * fac
        else:
            nrej += 1
            h = h * max(FAC_MIN, SAFETY * err ** -0.2)
    return rhos, ys, ks, status, nfev, nrej
