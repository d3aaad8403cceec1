# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Dormand-Prince 5(4) loop for the reduced shape equation.

Mirrors ``axishape._dopri.dopri5_eq8`` operation for operation.
"""

import numpy as np
from libc.math cimport cos, sin, sqrt, fabs, pow, NAN, isfinite

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192, A75 = -2187.0 / 6784, A76 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40
cdef double SAFETY = 0.9, FAC_MIN = 0.2, FAC_MAX = 10.0
cdef double H_MIN_REL = 1e-14


cdef inline void rhs(double r, double p, double q, double c0, double lt, double pt,
                     double om, double* out) noexcept nogil:
    cdef double c = cos(p)
    cdef double s = sin(p)
    cdef double den = r * c * c * c
    cdef double rest
    out[0] = q
    if den == 0.0:
        out[1] = NAN
        out[2] = NAN
        return
    rest = (-0.5 * r * c * c * s * q * q
            + c * c * c * q
            + s * s * s / (2.0 * r)
            + c0 * s * s
            - (lt * r * r + 1.0) * s / r
            - 0.5 * pt * r * r
            + om)
    out[1] = -rest / den
    out[2] = s / c


def eq8_rhs(double r, double p, double q, double c0, double lt, double pt, double om):
    cdef double out[3]
    rhs(r, p, q, c0, lt, pt, om, out)
    return out[0], out[1], out[2]


def dopri5_eq8(double rho0, double rho_end, y0, params, double rtol, double atol,
               double h_init, long max_steps, double cos_eps, double fixed_step):
    cdef double c0 = params[0], lt = params[1], pt = params[2], om = params[3]
    cdef double direction = 1.0 if rho_end >= rho0 else -1.0
    cdef double span = fabs(rho_end - rho0)
    cdef double r = rho0
    cdef double y[3]
    cdef double yn[3]
    cdef double k[7][3]
    cdef double f[3]
    cdef double yt0, yt1, d0, d1, d2, sc, h0, h, hs, remaining, r_new, err, e, fac, c, sgn0
    cdef long cap = 1024, n = 1, nsteps = 0, nfev = 0, nrej = 0
    cdef int status = 4, i, j, last
    y[0] = y0[0]; y[1] = y0[1]; y[2] = y0[2]
    sgn0 = 1.0 if cos(y[0]) >= 0 else -1.0

    rhos_a = np.empty(cap)
    ys_a = np.empty((cap, 3))
    ks_a = np.empty((cap, 7, 3))
    cdef double[::1] rhos = rhos_a
    cdef double[:, ::1] ys = ys_a
    cdef double[:, :, ::1] ks = ks_a
    rhos[0] = r
    for i in range(3):
        ys[0, i] = y[i]

    rhs(r, y[0], y[1], c0, lt, pt, om, &k[0][0])
    nfev += 1
    if not (isfinite(k[0][0]) and isfinite(k[0][1]) and isfinite(k[0][2])):
        return rhos_a[:1].copy(), ys_a[:1].copy(), ks_a[:0].copy(), 5, nfev, nrej
    if span == 0.0:
        return rhos_a[:1].copy(), ys_a[:1].copy(), ks_a[:0].copy(), 0, nfev, nrej

    if fixed_step > 0:
        h = fixed_step
    elif h_init > 0:
        h = h_init
    else:
        d0 = 0.0
        d1 = 0.0
        for i in range(3):
            sc = atol + rtol * fabs(y[i])
            d0 += (y[i] / sc) ** 2
            d1 += (k[0][i] / sc) ** 2
        d0 = sqrt(d0 / 3.0)
        d1 = sqrt(d1 / 3.0)
        if d0 < 1e-5 or d1 < 1e-5:
            h0 = 1e-6
        else:
            h0 = 0.01 * d0 / d1
        h0 = min(h0, span)
        yt0 = y[0] + direction * h0 * k[0][0]
        yt1 = y[1] + direction * h0 * k[0][1]
        rhs(r + direction * h0, yt0, yt1, c0, lt, pt, om, f)
        nfev += 1
        d2 = 0.0
        for i in range(3):
            sc = atol + rtol * fabs(y[i])
            d2 += ((f[i] - k[0][i]) / sc) ** 2
        d2 = sqrt(d2 / 3.0) / h0
        if not isfinite(d2):
            h = h0
        elif max(d1, d2) <= 1e-15:
            h = max(1e-6, h0 * 1e-3)
        else:
            h = pow(0.01 / max(d1, d2), 0.2)
        h = min(100.0 * h0, h, span)

    while nsteps < max_steps:
        remaining = fabs(rho_end - r)
        last = 0
        # absorb a sliver left over by roundoff into this step
        if h >= remaining or remaining - h < 1e-10 * h:
            h = remaining
            last = 1
        if h < H_MIN_REL * max(fabs(r), 1.0):
            status = 3
            break
        hs = direction * h
        rhs(r + C2 * hs, y[0] + hs * A21 * k[0][0], y[1] + hs * A21 * k[0][1],
            c0, lt, pt, om, &k[1][0])
        rhs(r + C3 * hs,
            y[0] + hs * (A31 * k[0][0] + A32 * k[1][0]),
            y[1] + hs * (A31 * k[0][1] + A32 * k[1][1]),
            c0, lt, pt, om, &k[2][0])
        rhs(r + C4 * hs,
            y[0] + hs * (A41 * k[0][0] + A42 * k[1][0] + A43 * k[2][0]),
            y[1] + hs * (A41 * k[0][1] + A42 * k[1][1] + A43 * k[2][1]),
            c0, lt, pt, om, &k[3][0])
        rhs(r + C5 * hs,
            y[0] + hs * (A51 * k[0][0] + A52 * k[1][0] + A53 * k[2][0] + A54 * k[3][0]),
            y[1] + hs * (A51 * k[0][1] + A52 * k[1][1] + A53 * k[2][1] + A54 * k[3][1]),
            c0, lt, pt, om, &k[4][0])
        rhs(r + hs,
            y[0] + hs * (A61 * k[0][0] + A62 * k[1][0] + A63 * k[2][0] + A64 * k[3][0] + A65 * k[4][0]),
            y[1] + hs * (A61 * k[0][1] + A62 * k[1][1] + A63 * k[2][1] + A64 * k[3][1] + A65 * k[4][1]),
            c0, lt, pt, om, &k[5][0])
        for i in range(3):
            yn[i] = y[i] + hs * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i]
                                 + A75 * k[4][i] + A76 * k[5][i])
        r_new = rho_end if last else r + hs
        rhs(r_new, yn[0], yn[1], c0, lt, pt, om, &k[6][0])
        nfev += 6

        err = 0.0
        if fixed_step <= 0:
            for i in range(3):
                e = hs * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i]
                          + E6 * k[5][i] + E7 * k[6][i])
                sc = atol + rtol * max(fabs(y[i]), fabs(yn[i]))
                err += (e / sc) ** 2
            err = sqrt(err / 3.0)
            if not isfinite(err):
                err = 1e300

        if err <= 1.0:
            if n >= cap:
                cap *= 2
                rhos_a = np.resize(rhos_a, cap)
                ys_a = np.resize(ys_a, (cap, 3))
                ks_a = np.resize(ks_a, (cap, 7, 3))
                rhos = rhos_a
                ys = ys_a
                ks = ks_a
            for j in range(7):
                for i in range(3):
                    ks[n - 1, j, i] = k[j][i]
            r = r_new
            for i in range(3):
                y[i] = yn[i]
                k[0][i] = k[6][i]
            rhos[n] = r
            for i in range(3):
                ys[n, i] = y[i]
            n += 1
            nsteps += 1
            c = cos(y[0])
            if c * sgn0 < cos_eps:
                status = 1
                break
            if last:
                status = 0
                break
            if fixed_step <= 0:
                if err == 0.0:
                    fac = FAC_MAX
                else:
                    fac = min(FAC_MAX, max(FAC_MIN, SAFETY * pow(err, -0.2)))
                h = h * fac
        else:
            nrej += 1
            h = h * max(FAC_MIN, SAFETY * pow(err, -0.2))

    return rhos_a[:n].copy(), ys_a[:n].copy(), ks_a[:n - 1].copy(), status, nfev, nrej
