"""Numerical checks of the restricted-ansatz symmetry analysis.

Covers the sin-psi series for ``sqrt(sec psi)`` and ``int sqrt(cos psi)``,
generators built from the ansatz
``eta = (C1 S + C2)/sqrt(cos psi)``, ``xi = C3 rho + 2 rho int C1/rho``
(with ``S = int sqrt(cos psi) dpsi``), grid falsification of the divergence
condition, and the closed-form coefficient relations for ``C2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError
from .geometry import ModelParams
from .shape_eq import Jet2
from .variational import Generator, noether_residual

PASS_THRESHOLD = 1e-10
FAIL_THRESHOLD = 1e-4
RHO_BASE = 1.0


# --------------------------------------------------------------------------
# Series in sin(psi)


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1):
        raise DomainError("series needs |sin psi| < 1")
    return x


def series_coefficients(n_terms: int) -> np.ndarray:
    """``Gamma(n + 1/4) / (Gamma(1/4) Gamma(n + 1))`` for n < n_terms, by the ratio recurrence."""
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    n = np.arange(n_terms - 1, dtype=float)
    return np.concatenate(([1.0], np.cumprod((n + 0.25) / (n + 1.0))))


def _sum_even_powers(coef, x2, odd_x=None):
    # Horner in x^2
    acc = np.zeros_like(x2)
    for a in coef[::-1]:
        acc = acc * x2 + a
    return acc if odd_x is None else acc * odd_x


def series_sqrt_sec(sin_psi, n_terms: int):
    """Truncated ``sqrt(sec psi) = sum a_n sin^{2n} psi``."""
    x = _check_x(sin_psi)
    return _sum_even_powers(series_coefficients(n_terms), x * x)


def series_int_sqrt_cos(sin_psi, n_terms: int, G: float = 0.0):
    """Truncated ``int sqrt(cos psi) dpsi = G + sum a_n sin^{2n+1} psi / (2n+1)``."""
    x = _check_x(sin_psi)
    a = series_coefficients(n_terms)
    return G + _sum_even_powers(a / (2 * np.arange(n_terms) + 1.0), x * x, odd_x=x)


def terms_for(sin_max: float, tol: float = 1e-17) -> int:
    """Number of terms after which ``sin_max^{2n}`` drops below ``tol``."""
    if not 0 <= sin_max < 1:
        raise DomainError("need 0 <= sin_max < 1")
    if sin_max == 0:
        return 1
    return int(np.ceil(np.log(tol) / (2 * np.log(sin_max)))) + 1


def int_sqrt_cos(psi, G: float = 0.0):
    """``G + int_0^psi sqrt(cos t) dt`` on |psi| < pi/2 via the series, with enough terms."""
    psi = np.asarray(psi, dtype=float)
    if np.any(np.abs(psi) >= np.pi / 2):
        raise DomainError("|psi| must be below pi/2")
    x = np.sin(psi)
    n = terms_for(float(np.max(np.abs(x))) if x.size else 0.0)
    return series_int_sqrt_cos(x, n, G)


# --------------------------------------------------------------------------
# Ansatz generators


@dataclass(frozen=True)
class RadialFunction:
    """``C(rho)`` with its first two derivatives."""

    f: Callable
    df: Callable
    d2f: Callable

    def __call__(self, rho):
        return self.f(rho) + 0.0 * rho

    @classmethod
    def constant(cls, c: float) -> "RadialFunction":
        return cls(lambda r: c + 0.0 * r, lambda r: 0.0 * r, lambda r: 0.0 * r)

    @classmethod
    def linear(cls, a: float, b: float = 0.0) -> "RadialFunction":
        """``a rho + b``."""
        return cls(lambda r: a * r + b, lambda r: a + 0.0 * r, lambda r: 0.0 * r)

    @classmethod
    def power(cls, a: float, k: float) -> "RadialFunction":
        """``a rho^k``."""
        return cls(lambda r: a * r**k, lambda r: a * k * r ** (k - 1),
                   lambda r: a * k * (k - 1) * r ** (k - 2))


ZERO = RadialFunction.constant(0.0)


@dataclass(frozen=True)
class AnsatzGenerator:
    C1: RadialFunction = ZERO
    C2: RadialFunction = ZERO
    C3: float = 0.0
    G: float = 0.0
    label: str = ""

    @property
    def is_trivial(self) -> bool:
        """True when only the dilation part (C3) can be nonzero."""
        probe = np.array([0.3, 1.0, 2.7])
        return bool(np.all(self.C1(probe) == 0) and np.all(self.C2(probe) == 0))


def _radial_quad(f, rho):
    """``int_{RHO_BASE}^{rho} f``, one quadrature per distinct rho."""
    rho = np.asarray(rho, dtype=float)
    uniq, inv = np.unique(rho.ravel(), return_inverse=True)
    vals = np.array([integrate.quad(f, RHO_BASE, float(x), epsabs=1e-14, epsrel=1e-13)[0] for x in uniq])
    return vals[inv].reshape(rho.shape)


def _int_c1_over_rho(C1: RadialFunction, rho):
    rho = np.asarray(rho, dtype=float)
    if np.all(C1(np.unique(rho)) == 0):
        return np.zeros_like(rho)
    return _radial_quad(lambda r: C1(r) / r, rho)


def ansatz_to_generator(a: AnsatzGenerator, params: ModelParams | None = None) -> Generator:
    """Generator with ``F = 0`` and exact partial derivatives.

    ``B`` is fixed by its psi-derivative ``rho sqrt(cos psi)(C1' S + C2')``
    (which removes the psi'-linear term of the divergence condition) and by
    ``B_rho`` at psi = 0, chosen to cancel the condition there; only its
    derivatives enter the condition.  ``params`` defaults to all zeros.
    """
    params = ModelParams() if params is None else params
    lt, pt, om = params.lambda_t, params.p_t, params.omega0
    C1, C2, C3, G = a.C1, a.C2, float(a.C3), float(a.G)

    def S0(psi):
        return int_sqrt_cos(psi)

    def xi(r, p, q):
        return C3 * r + 2 * r * _int_c1_over_rho(C1, r) + 0.0 * (p + q)

    def xi_rho(r, p, q):
        return C3 + 2 * _int_c1_over_rho(C1, r) + 2 * C1(r) + 0.0 * (p + q)

    def eta(r, p, q):
        return (C1(r) * (G + S0(p)) + C2(r)) / np.sqrt(np.cos(p)) + 0.0 * q

    def eta_psi(r, p, q):
        return C1(r) + 0.5 * np.tan(p) * eta(r, p, q)

    def eta_rho(r, p, q):
        return (C1.df(r) * (G + S0(p)) + C2.df(r)) / np.sqrt(np.cos(p)) + 0.0 * q

    def b_prime(r):
        xr = C3 * r + 2 * r * _int_c1_over_rho(C1, r)
        xrr = C3 + 2 * _int_c1_over_rho(C1, r) + 2 * C1(r)
        return lt * r * xrr + lt * xr - (om - 0.5 * pt * r * r) * (C1(r) * G + C2(r))

    def B_psi(r, p, q):
        return r * np.sqrt(np.cos(p)) * (C1.df(r) * (G + S0(p)) + C2.df(r)) + 0.0 * q

    def B_rho(r, p, q):
        s0 = S0(p)
        return ((C1.df(r) + r * C1.d2f(r)) * (G * s0 + 0.5 * s0 * s0)
                + (C2.df(r) + r * C2.d2f(r)) * s0 + b_prime(r) + 0.0 * q)

    def B(r, p, q):
        # psi-dependent part; the radial part int b' is taken from RHO_BASE
        s0 = S0(p)
        radial = _radial_quad(lambda x: float(b_prime(x)), r)
        return r * (C1.df(r) * (G * s0 + 0.5 * s0 * s0) + C2.df(r) * s0) + radial + 0.0 * q

    def zero(r, p, q):
        return 0.0 * (r + p + q)

    partials = {
        "xi_rho": xi_rho, "xi_psi": zero, "xi_psip": zero,
        "eta_rho": eta_rho, "eta_psi": eta_psi, "eta_psip": zero,
        "B_rho": B_rho, "B_psi": B_psi, "B_psip": zero,
        "F_rho": zero, "F_psi": zero, "F_psip": zero,
    }
    return Generator(xi=xi, eta=eta, B=B, F=zero, partials=partials)


# --------------------------------------------------------------------------
# Grid falsification


@dataclass(frozen=True)
class Grid:
    rho: np.ndarray
    psi: np.ndarray
    psi_p: np.ndarray
    psi_pp: np.ndarray

    def jet(self) -> Jet2:
        R, P, Q, Q2 = np.meshgrid(self.rho, self.psi, self.psi_p, self.psi_pp, indexing="ij")
        return Jet2(R.ravel(), P.ravel(), Q.ravel(), Q2.ravel())

    @property
    def size(self) -> int:
        return len(self.rho) * len(self.psi) * len(self.psi_p) * len(self.psi_pp)


def standard_grid() -> Grid:
    """rho log-spaced on [0.2, 5] (40), psi on [-1.2, 1.2] (40), psi' in {-1, 0, 1}, psi'' = 0."""
    return Grid(
        rho=np.logspace(np.log10(0.2), np.log10(5.0), 40),
        psi=np.linspace(-1.2, 1.2, 40),
        psi_p=np.array([-1.0, 0.0, 1.0]),
        psi_pp=np.array([0.0]),
    )


def parameter_lattice(values: Sequence[float] = (0.0, 0.1, -0.1, 1.0, -1.0)) -> list[ModelParams]:
    """All (c0, lambda_t, p_t, omega0) combinations drawn from ``values``."""
    import itertools

    return [ModelParams(c0=a, lambda_t=b, p_t=c, omega0=d)
            for a, b, c, d in itertools.product(values, repeat=4)]


def _verdict(value: float) -> str:
    if value <= PASS_THRESHOLD:
        return "pass"
    if value >= FAIL_THRESHOLD:
        return "fail"
    return "indeterminate"


@dataclass(frozen=True)
class TrialResult:
    label: str
    trivial: bool
    max_residual: float
    verdict: str


@dataclass(frozen=True)
class RigidityReport:
    params: ModelParams
    results: tuple
    at_origin: bool
    trivial_ok: bool
    nontrivial_ok: bool

    @property
    def consistent(self) -> bool:
        """Both assertions hold: (a) the trivial generator passes iff all
        parameters vanish, (b) non-trivial trials fail off the origin."""
        return self.trivial_ok and self.nontrivial_ok


def default_trials() -> list[AnsatzGenerator]:
    R = RadialFunction
    return [
        AnsatzGenerator(C3=2.0, label="dilation"),
        AnsatzGenerator(C1=R.constant(1.0), C3=1.0, label="C1=1,C3=1"),
        AnsatzGenerator(C2=R.linear(1.0), C3=1.0, label="C2=rho,C3=1"),
        AnsatzGenerator(C1=R.power(0.5, 2), C2=R.constant(1.0), label="C1=rho^2/2,C2=1"),
        AnsatzGenerator(C2=R.linear(0.125), C3=1.0, G=0.3, label="C2=rho/8,C3=1,G=0.3"),
    ]


def trial_residual(params: ModelParams, trial: AnsatzGenerator, grid: Grid | None = None) -> float:
    grid = standard_grid() if grid is None else grid
    gen = ansatz_to_generator(trial, params)
    return float(np.max(np.abs(noether_residual(gen, grid.jet(), params))))


def rigidity_scan(params: ModelParams, trial_set: Sequence[AnsatzGenerator] | None = None,
                  grid: Grid | None = None) -> RigidityReport:
    trials = default_trials() if trial_set is None else list(trial_set)
    at_origin = params.is_willmore
    results = []
    trivial_ok = True
    nontrivial_ok = True
    for t in trials:
        m = trial_residual(params, t, grid)
        v = _verdict(m)
        results.append(TrialResult(t.label, t.is_trivial, m, v))
        if t.is_trivial and t.C3 != 0:
            trivial_ok &= (v == "pass") if at_origin else (v == "fail")
        elif not t.is_trivial and not at_origin:
            nontrivial_ok &= v == "fail"
    return RigidityReport(params, tuple(results), at_origin, trivial_ok, nontrivial_ok)


# --------------------------------------------------------------------------
# Polynomial-in-n coefficient argument


def n_polynomial(lambda_t, rho, C1, dC1, d2C1, IC1, C3) -> np.ndarray:
    """Coefficients (ascending powers of n) of the order-n relation from the
    series expansion that involves only C1, its integral and C3."""
    P = np.polynomial.Polynomial
    n = P([0.0, 1.0])
    lr2 = lambda_t * rho**2
    expr = (
        -12 * lr2 * (4 * n + 1) * (2 * n + 1) * (2 * n + 3) * (2 * n + 5) * IC1
        - 6 * C3 * lr2 * (2 * n + 1) * (2 * n + 3) * (2 * n + 5) * (4 * n + 1)
        - 4 * (-135 - 348 * n - 172 * n**2 + 24 * n**3 + 16 * n**4
               + (n + 3) * (2 * n + 1) * (4 * n + 1) * (4 * n + 5) * lr2) * C1
        - rho * (415 + 792 * n + 308 * n**2) * (dC1 + rho * d2C1)
    )
    return np.pad(expr.coef, (0, 5 - len(expr.coef)))


def n_coefficient_elimination(lambda_t, rho):
    """Eliminate ``C3 + 2 int C1/rho`` between the n^4 and n^3 coefficients.

    Returns the factor ``k(rho)`` in ``k C1 = 0``; the n^3 and n^4 rows are
    linear in ``(X, C1)`` with ``X = C3 + 2 int C1/rho``, so the eliminant is
    the determinant of that 2x2 system.  It equals
    ``3072 L (2 L - 13)`` with ``L = lambda_t rho^2``; at ``lambda_t = 0``
    the n^4 row alone already reads ``-64 C1 = 0``.
    """
    # coefficients of X and C1 in each row, read off with unit probes
    def row(power):
        x_only = n_polynomial(lambda_t, rho, 0.0, 0.0, 0.0, 0.0, 1.0)[power]
        c1_only = n_polynomial(lambda_t, rho, 1.0, 0.0, 0.0, 0.0, 0.0)[power]
        return x_only, c1_only

    a3, b3 = row(3)
    a4, b4 = row(4)
    return a4 * b3 - a3 * b4


# --------------------------------------------------------------------------
# C2 relations with C1 = 0


def c2_closed_forms(params: ModelParams, C3: float, rho):
    """The two closed forms for ``C2`` obtained from pairs of the C1 = 0 relations."""
    c0, lt, pt, om = params.c0, params.lambda_t, params.p_t, params.omega0
    rho = np.asarray(rho, dtype=float)
    a = C3 * rho * (8 * c0 + 10 * om - 15 * pt * rho**2) / (4 * (4 + 7 * lt * rho**2))
    b = C3 * rho * (48 * c0 + 70 * om - 105 * pt * rho**2) / (16 * (3 + 4 * lt * rho**2))
    return a, b


@dataclass(frozen=True)
class ChainStep:
    statement: str
    holds: bool


@dataclass(frozen=True)
class CoefficientReport:
    params: ModelParams
    rho: np.ndarray
    c2_first: np.ndarray
    c2_second: np.ndarray
    forms_agree: np.ndarray
    relation: np.ndarray
    chain: tuple = field(default_factory=tuple)

    @property
    def consistent(self) -> bool:
        return bool(np.all(self.forms_agree))

    @property
    def admissible(self) -> bool:
        """Every step of the elimination chain holds, i.e. a non-trivial C3 survives."""
        return all(step.holds for step in self.chain)


def coefficient_relations_check(params: ModelParams, a: AnsatzGenerator, rho_samples) -> CoefficientReport:
    """Evaluate the C2 relations for ``C1 = 0`` and walk the elimination chain.

    Chain (each step assumes the previous ones):
    ``C3 lambda_t = 0``; the two C2 forms agree, i.e.
    ``6 c0 + 10 omega0 - 15 p_t rho^2 = 0`` at every sample, which forces
    ``p_t = 0`` and ``omega0 = -3 c0 / 5``; then ``C2 = c0 C3 rho / 8``; and
    ``c0 C2 = c0^2 C3 rho / 8 = 0`` forces ``c0 = 0``.
    """
    rho = np.atleast_1d(np.asarray(rho_samples, dtype=float))
    if np.any(a.C1(rho) != 0):
        raise DomainError("coefficient relations apply to C1 = 0 only")
    c0, lt, pt, om = params.c0, params.lambda_t, params.p_t, params.omega0
    C3 = float(a.C3)
    f1, f2 = c2_closed_forms(params, C3, rho)
    scale = np.maximum(np.maximum(np.abs(f1), np.abs(f2)), 1e-300)
    agree = np.abs(f1 - f2) <= 1e-12 * np.maximum(scale, 1.0)
    relation = 6 * c0 + 10 * om - 15 * pt * rho**2
    if len(rho) >= 2:
        # least-squares split of the relation into constant and rho^2 parts
        A = np.column_stack((np.ones_like(rho), rho**2))
        (k0, k2), *_ = np.linalg.lstsq(A, relation, rcond=None)
    else:
        k0, k2 = relation[0], 0.0
    c2_forced = c0 * C3 * rho / 8
    chain = (
        ChainStep("C3 * lambda_t = 0", bool(C3 * lt == 0)),
        ChainStep("6 c0 + 10 omega0 - 15 p_t rho^2 = 0 at all samples", bool(np.all(np.abs(relation) <= 1e-12))),
        ChainStep("p_t = 0", bool(abs(k2) <= 1e-12 and pt == 0)),
        ChainStep("omega0 = -3/5 c0", bool(abs(om + 0.6 * c0) <= 1e-12 * max(1.0, abs(c0)))),
        ChainStep("C2 = c0 C3 rho / 8", bool(np.allclose(f1, c2_forced, rtol=1e-12, atol=1e-14))),
        ChainStep("c0 C2 = c0^2 C3 rho / 8 = 0", bool(np.all(np.abs(c0 * c2_forced) <= 1e-14))),
    )
    return CoefficientReport(params, rho, f1, f2, agree, relation, chain)
