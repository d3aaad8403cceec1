"""Time the compiled and pure-Python integrator kernels on the same problems.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from axishape import _backend
from axishape.geometry import ModelParams, State
from axishape.shape_eq import integrate

CASES = {
    "willmore": (State(1.0, 0.3, 0.2), (1.0, 3.0), ModelParams()),
    "full-params": (State(1.0, 0.2, 0.1), (1.0, 2.5), ModelParams(c0=0.4, lambda_t=0.3, p_t=-0.1, omega0=0.2)),
    "tight-tol": (State(0.8, -0.3, 0.4), (0.8, 2.0), ModelParams(omega0=0.1)),
}


def run(repeat: int) -> None:
    backends = _backend.available_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"{'case':<12} {'backend':<8} {'steps':>6} {'kernel ms':>10} {'speedup':>8} {'total ms':>9}")
    for name, (st, span, params) in CASES.items():
        tol = 1e-12 if name == "tight-tol" else 1e-10
        kp = (params.c0, params.lambda_t, params.p_t, params.omega0)
        y0 = (st.psi, st.psi_p, st.z)
        kernel, total, results = {}, {}, {}
        for b in backends:
            raw = lambda b=b: _backend.dopri5_eq8(span[0], span[1], y0, kp, tol, tol, 0.0,  # noqa: E731
                                                  1_000_000, 0.25, 0.0, backend=b)
            full = lambda b=b: integrate(st, span, params, tol, cos_eps=0.25, backend=b)  # noqa: E731
            results[b] = full()
            kernel[b] = min(timeit.repeat(raw, number=1, repeat=repeat))
            total[b] = min(timeit.repeat(full, number=1, repeat=repeat))
        ref = kernel.get("python")
        for b in backends:
            speed = f"{ref / kernel[b]:.1f}x" if ref else "-"
            print(f"{name:<12} {b:<8} {results[b].stats['nsteps']:>6} {1e3 * kernel[b]:>10.3f} {speed:>8}"
                  f" {1e3 * total[b]:>9.2f}")
        if len(results) == 2:
            a, c = results["python"], results["cython"]
            print(f"{'':<12} max |psi_py - psi_cy| = {np.max(np.abs(a.psi - c.psi)):.2e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    run(ap.parse_args().repeat)
