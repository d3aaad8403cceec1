"""Select the compiled integration kernel, falling back to pure Python.

Set ``AXISHAPE_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _dopri

BACKEND = "python"
_compiled = None

if not os.environ.get("AXISHAPE_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    else:
        BACKEND = "cython"


def available_backends():
    return ("cython", "python") if _compiled is not None else ("python",)


def dopri5_eq8(rho0, rho_end, y0, params, rtol, atol, h_init=0.0, max_steps=1_000_000,
               cos_eps=1e-6, fixed_step=0.0, backend=None):
    """Run the stepping kernel; returns ``(rhos, ys, ks, status, nfev, nrej)`` as arrays."""
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel not built")
        mod = _compiled
    elif backend == "python":
        mod = _dopri
    else:
        raise ValueError(f"unknown backend {backend!r}")
    rhos, ys, ks, status, nfev, nrej = mod.dopri5_eq8(
        float(rho0), float(rho_end), tuple(float(v) for v in y0),
        tuple(float(v) for v in params), float(rtol), float(atol), float(h_init),
        int(max_steps), float(cos_eps), float(fixed_step),
    )
    rhos = np.asarray(rhos, dtype=float)
    ys = np.asarray(ys, dtype=float).reshape(-1, 3)
    ks = np.asarray(ks, dtype=float).reshape(-1, 7, 3)
    return rhos, ys, ks, int(status), int(nfev), int(nrej)
