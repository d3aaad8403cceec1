import warnings

import numpy as np
import pytest

from axishape import catalog as C
from axishape.errors import DomainError
from axishape.geometry import ModelParams
from axishape.shape_eq import Jet2, omega_effective

SHAPES = {
    "sphere": [{"R": 1.0}, {"R": 0.4}, {"R": 3.0}],
    "catenoid": [{"rho0": 1.0}, {"rho0": 2.5, "v_max": 1.0}],
    "cylinder": [{"R": 1.0}, {"R": 2.0, "orientation": -1}],
    "unduloid-constraint": [{"a": 0.5, "b": 1.5}, {"a": 0.2, "b": 0.7}],
    "clifford-torus": [{"R": float(np.sqrt(2)), "r": 1.0}, {"R": 2 * float(np.sqrt(2)), "r": 2.0}],
    "flat-disc": [{"R": 1.0}],
}
CASES = [(n, s) for n, shapes in SHAPES.items() for s in shapes]


@pytest.mark.parametrize("name,shape", CASES)
@pytest.mark.parametrize("kw", [{}, {"lam": 0.3, "c0": 0.4}, {"kc": 2.0, "lam": -0.5}])
def test_entries_solve_the_general_equation(name, shape, kw):
    e = C.make_entry(name, shape, n=61)
    P = C.solving_params(e, **kw)
    with warnings.catch_warnings():
        warnings.simplefilter("error", C.ConstraintWarning)
        prof, rep = C.catalog_profile(e, P)
    assert rep.residual_ok and rep.max_residual <= C.RESIDUAL_TOL
    assert rep.constraint_ok
    assert len(prof) == 61 and prof.chart == "parametric"


@pytest.mark.parametrize("name,shape", CASES)
def test_analytic_jets_match_finite_differences(name, shape):
    e = C.make_entry(name, shape, n=15)
    u = e.parameter_grid()[3:-3]
    h = 1e-5

    def d_ds(f):
        up, dn = e.point_at(u + h)[0], e.point_at(u - h)[0]
        return (f(up) - f(dn)) / (2 * h) / e.point_at(u)[1]

    pt = e.point_at(u)[0]
    np.testing.assert_allclose(d_ds(lambda p: p.psi), pt.psi_dot, atol=1e-7)
    np.testing.assert_allclose(d_ds(lambda p: p.psi_dot), pt.psi_ddot, atol=1e-6)
    np.testing.assert_allclose(d_ds(lambda p: p.psi_ddot), pt.psi_dddot, atol=1e-5)
    np.testing.assert_allclose(d_ds(lambda p: p.rho), np.cos(pt.psi), atol=1e-7)
    if name != "unduloid-constraint":
        np.testing.assert_allclose(d_ds(lambda p: p.z), np.sin(pt.psi), atol=1e-7)


def test_unduloid_height_and_arc_length():
    e = C.make_entry("unduloid-constraint", n=41)
    pts = e.points()
    assert np.all(np.diff(pts.s) > 0)
    # one full period closes in rho and psi
    assert pts.rho[-1] == pytest.approx(pts.rho[0], abs=1e-14)
    assert np.cos(pts.psi[-1]) == pytest.approx(np.cos(pts.psi[0]), abs=1e-12)


def test_constraint_values():
    sph = C.make_entry("sphere", {"R": 2.0})
    P = ModelParams.from_physical(c0=0.0, lam=1.0, p=-1.0)
    assert sph.constraint(P) == pytest.approx(0.0)
    cat = C.make_entry("catenoid")
    assert cat.constraint(ModelParams.from_physical(lam=3.0)) == 0.0
    assert cat.constraint(ModelParams(c0=0.1, lambda_t=0.005)) == pytest.approx(0.1)
    torus = C.make_entry("clifford-torus", {"R": 2.0, "r": 1.0})
    assert torus.constraint(ModelParams()) == pytest.approx(2 - np.sqrt(2))


def test_cylinder_orientations():
    up = C.make_entry("cylinder", {"R": 2.0})
    down = C.make_entry("cylinder", {"R": 2.0, "orientation": -1})
    # with no tension or spontaneous curvature, p = e / (2 R^3) balances the bending stress
    assert C.solving_params(up).p == pytest.approx(1 / 16)
    assert C.solving_params(down).p == pytest.approx(-1 / 16)
    assert down.point_at(np.array([0.5]))[0].psi[0] == pytest.approx(-np.pi / 2)


def test_constraint_violation_warns_but_returns_profile():
    e = C.make_entry("sphere")
    with pytest.warns(C.ConstraintWarning):
        prof, rep = C.catalog_profile(e, ModelParams.from_physical(p=0.5))
    assert not rep.constraint_ok and rep.warnings
    assert not rep.residual_ok
    assert len(prof) == e.n


def test_report_dict():
    prof, rep = C.catalog_profile(C.make_entry("catenoid", n=11))
    d = rep.as_dict()
    assert d["name"] == "catenoid" and d["residual_ok"] and d["constraint_ok"]
    assert d["params"]["lambda"] == 0.0 and d["shape"]["rho0"] == 1.0


def test_willmore_entries_carry_charge_and_first_integral():
    prof, _ = C.catalog_profile(C.make_entry("catenoid", n=21))
    # the waist has a vertical tangent, where neither quantity is defined
    waist = np.abs(np.cos(prof.psi)) < 1e-8
    assert waist.sum() == 1 and np.isnan(prof.I[waist]).all()
    np.testing.assert_allclose(prof.I[~waist], 0.0, atol=1e-12)
    np.testing.assert_allclose(prof.Q_scale[~waist], 0.0, atol=1e-12)
    prof, _ = C.catalog_profile(C.make_entry("sphere", n=21), C.solving_params(C.make_entry("sphere"), lam=1.0))
    assert np.all(np.isnan(prof.Q_scale))


def test_clifford_torus_needs_nonzero_omega0():
    e = C.make_entry("clifford-torus", n=40)
    pts = e.points()
    ok = np.abs(np.cos(pts.psi)) > 0.3
    q = pts.psi_dot[ok] / np.cos(pts.psi[ok])
    q2 = (pts.psi_ddot[ok] + np.sin(pts.psi[ok]) * q * q * np.cos(pts.psi[ok])) / np.cos(pts.psi[ok]) ** 2
    om = omega_effective(Jet2(pts.rho[ok], pts.psi[ok], q, q2), ModelParams())
    assert np.ptp(om) <= 1e-10
    assert abs(om[0]) >= 0.1


def test_bad_inputs():
    with pytest.raises(DomainError):
        C.make_entry("ellipsoid")
    with pytest.raises(DomainError):
        C.make_entry("sphere", {"R": -1.0}).points()
    with pytest.raises(DomainError):
        C.make_entry("unduloid-constraint", {"a": 2.0, "b": 1.0}).points()
    with pytest.raises(DomainError):
        C.make_entry("clifford-torus", {"R": 1.0, "r": 1.0}).points()
    with pytest.raises(DomainError):
        C.make_entry("cylinder", {"orientation": 0}).points()
