import numpy as np
import pytest
import sympy as sp

from axishape.geometry import ModelParams
from axishape.shape_eq import Jet2, Jet3


def _symbolic_jet(expr_factory):
    r, a = sp.symbols("r a", positive=True)
    psi = expr_factory(r, a)
    derivs = [psi] + [sp.diff(psi, r, k) for k in (1, 2, 3)]
    fns = [sp.lambdify((r, a), d, "numpy") for d in derivs]

    def jet(a_val, rho):
        rho = np.asarray(rho, dtype=float)
        return Jet3(rho, *(f(rho, a_val) for f in fns))

    return jet


# psi(rho) on the analytic families, differentiated symbolically
_sphere = _symbolic_jet(lambda r, R: sp.asin(r / R))
_catenoid = _symbolic_jet(lambda r, r0: sp.asin(r0 / r))


def sphere_jet(R, psi):
    """Jet of the sphere rho = R sin(psi) at tangent angle psi in (0, pi/2)."""
    return _sphere(R, R * np.sin(psi))


def catenoid_jet(r0, psi):
    """Jet of the catenoid rho = r0 csc(psi) at tangent angle psi in (0, pi/2)."""
    return _catenoid(r0, r0 / np.sin(psi))


def as_jet2(j: Jet3) -> Jet2:
    return Jet2(j.rho, j.psi, j.psi_p, j.psi_pp)


def random_jets(rng, n, psi_max=1.4):
    return Jet3(
        rng.uniform(0.1, 10, n),
        rng.uniform(-psi_max, psi_max, n),
        rng.uniform(-2, 2, n),
        rng.uniform(-2, 2, n),
        rng.uniform(-2, 2, n),
    )


def random_params(rng):
    return ModelParams(*rng.uniform(-1, 1, 4))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
