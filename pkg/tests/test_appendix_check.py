import numpy as np
import pytest
import sympy as sp
from scipy import integrate

from axishape.appendix_check import (
    AnsatzGenerator,
    Grid,
    RadialFunction,
    ansatz_to_generator,
    c2_closed_forms,
    coefficient_relations_check,
    default_trials,
    int_sqrt_cos,
    n_coefficient_elimination,
    n_polynomial,
    parameter_lattice,
    rigidity_scan,
    series_coefficients,
    series_int_sqrt_cos,
    series_sqrt_sec,
    terms_for,
    trial_residual,
)
from axishape.errors import DomainError
from axishape.geometry import ModelParams
from axishape.shape_eq import Jet2
from axishape.variational import Generator, dilation_generator, noether_residual

# -- series


def test_coefficients_match_binomial_series():
    x = sp.symbols("x")
    ser = sp.series((1 - x**2) ** sp.Rational(-1, 4), x, 0, 30).removeO()
    expected = [float(ser.coeff(x, 2 * n)) for n in range(15)]
    np.testing.assert_allclose(series_coefficients(15), expected, rtol=1e-14)
    assert series_coefficients(2)[1] == 0.25


def test_series_examples():
    assert series_sqrt_sec(0.5, 60) == pytest.approx(0.75**-0.25, abs=1e-15)
    assert series_sqrt_sec(0.5, 60) == pytest.approx(1.0745699, abs=1e-7)
    assert series_sqrt_sec(0.0, 1) == 1.0
    assert series_int_sqrt_cos(0.0, 10, G=0.7) == 0.7


@pytest.mark.parametrize("x", [0.1, 0.5, 0.8, 0.9, -0.7])
def test_int_sqrt_cos_matches_quadrature(x):
    psi = np.arcsin(x)
    ref = integrate.quad(lambda t: np.sqrt(np.cos(t)), 0, psi, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    assert series_int_sqrt_cos(x, 400) == pytest.approx(ref, abs=1e-13)
    assert int_sqrt_cos(psi) == pytest.approx(ref, abs=1e-13)


def test_series_error_decreases_with_terms():
    x = 0.9
    exact = (1 - x * x) ** -0.25
    errs = [abs(series_sqrt_sec(x, n) - exact) for n in (10, 50, 100, 200)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 1e-10


def test_terms_for():
    assert terms_for(0.0) == 1
    n = terms_for(0.5)
    assert 0.5 ** (2 * (n - 1)) <= 1e-17 < 0.5 ** (2 * (n - 3))
    with pytest.raises(DomainError):
        terms_for(1.0)


def test_series_domain_errors():
    with pytest.raises(DomainError):
        series_sqrt_sec(1.0, 10)
    with pytest.raises(DomainError):
        series_coefficients(0)
    with pytest.raises(DomainError):
        int_sqrt_cos(np.pi / 2)


# -- ansatz generators


SMALL_GRID = Grid(rho=np.array([0.4, 1.0, 2.3]), psi=np.array([-0.9, 0.2, 1.1]),
                  psi_p=np.array([-1.0, 0.5]), psi_pp=np.array([0.0, 0.7]))


def test_pure_dilation_ansatz_equals_dilation_generator():
    # the radial gauge term only switches on with tension, pressure or omega0
    jet = SMALL_GRID.jet()
    P = ModelParams(c0=0.3)
    gen = ansatz_to_generator(AnsatzGenerator(C3=2.0), P)
    np.testing.assert_allclose(noether_residual(gen, jet, P), noether_residual(dilation_generator(), jet, P),
                               rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("trial", default_trials()[1:], ids=lambda t: t.label)
def test_exact_partials_match_finite_differences(trial):
    P = ModelParams(c0=0.1, lambda_t=0.2, p_t=-0.1, omega0=0.3)
    exact = ansatz_to_generator(trial, P)
    numeric = Generator(xi=exact.xi, eta=exact.eta, B=exact.B, F=exact.F)
    r, p, q = 1.3, 0.4, 0.2
    for name in ("xi", "eta", "B"):
        for var in ("rho", "psi"):
            assert exact.partial(name, var, r, p, q) == pytest.approx(
                numeric.partial(name, var, r, p, q), rel=1e-6, abs=1e-7), (name, var)


def test_psi_prime_linear_term_is_removed():
    P = ModelParams()
    trial = AnsatzGenerator(C1=RadialFunction.constant(1.0), C3=1.0)
    gen = ansatz_to_generator(trial, P)
    rho, psi = 1.4, 0.3
    # residual is a polynomial in psi'; extract the linear coefficient from three samples
    vals = [float(noether_residual(gen, Jet2(rho, psi, q, 0.0), P)) for q in (-1.0, 0.0, 1.0)]
    vals3 = [float(noether_residual(gen, Jet2(rho, psi, q, 0.0), P)) for q in (-2.0, 2.0)]
    # cubic fit through five points
    qs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    coef = np.polyfit(qs, [vals3[0], *vals, vals3[1]], 3)
    assert abs(coef[2]) <= 1e-9


def test_trivial_flag():
    assert AnsatzGenerator(C3=1.0).is_trivial
    assert not AnsatzGenerator(C2=RadialFunction.linear(1.0)).is_trivial


# -- rigidity


def test_rigidity_at_origin_and_off_origin():
    origin = rigidity_scan(ModelParams())
    assert origin.at_origin and origin.consistent
    dil = [r for r in origin.results if r.label == "dilation"][0]
    assert dil.verdict == "pass" and dil.max_residual <= 1e-10
    for P in (ModelParams(c0=0.1), ModelParams(lambda_t=-1.0), ModelParams(p_t=0.1, omega0=-1.0)):
        rep = rigidity_scan(P)
        assert not rep.at_origin and rep.consistent
        assert all(r.verdict == "fail" for r in rep.results)


def test_parameter_lattice_size():
    lat = parameter_lattice()
    assert len(lat) == 625
    assert sum(p.is_willmore for p in lat) == 1


def test_trial_residual_small_grid():
    assert trial_residual(ModelParams(), AnsatzGenerator(C3=1.0), SMALL_GRID) <= 1e-12


# -- coefficient relations


@pytest.mark.parametrize("lt", [0.3, -1.0, 2.0])
@pytest.mark.parametrize("rho", [0.5, 1.7])
def test_eliminant_closed_form(lt, rho):
    L = lt * rho * rho
    assert n_coefficient_elimination(lt, rho) == pytest.approx(3072 * L * (2 * L - 13), rel=1e-12)


def test_leading_order_at_zero_tension():
    coef = n_polynomial(0.0, 1.3, 1.0, 0.0, 0.0, 0.0, 0.0)
    assert coef[4] == pytest.approx(-64.0)
    assert n_coefficient_elimination(0.0, 1.3) == 0.0


def test_c2_forms_agree_on_constraint_surface():
    P = ModelParams(c0=0.5, omega0=-0.3)
    rho = np.array([0.3, 1.0, 2.0])
    a, b = c2_closed_forms(P, 2.0, rho)
    np.testing.assert_allclose(a, b, rtol=1e-14)
    np.testing.assert_allclose(a, 0.5 * 2.0 * rho / 8, rtol=1e-14)
    a, b = c2_closed_forms(ModelParams(c0=0.5), 2.0, rho)
    assert np.all(np.abs(a - b) > 1e-3)


def test_elimination_chain():
    rho = np.linspace(0.5, 3, 6)
    full = coefficient_relations_check(ModelParams(), AnsatzGenerator(C3=1.0), rho)
    assert full.admissible and full.consistent
    surface = coefficient_relations_check(ModelParams(c0=0.5, omega0=-0.3), AnsatzGenerator(C3=1.0), rho)
    assert [s.holds for s in surface.chain] == [True, True, True, True, True, False]
    off = coefficient_relations_check(ModelParams(c0=0.5), AnsatzGenerator(C3=1.0), rho)
    assert not off.chain[1].holds and not off.admissible
    with pytest.raises(DomainError):
        coefficient_relations_check(ModelParams(), AnsatzGenerator(C1=RadialFunction.constant(1.0)), rho)
