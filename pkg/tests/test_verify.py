import numpy as np
import pytest

from axishape.errors import DomainError
from axishape.verify import (
    DEFAULT_SETTINGS,
    SUITES,
    Check,
    max_relative_drift,
    random_willmore_trajectories,
    run_verification,
)


@pytest.fixture(scope="module")
def full_report():
    return run_verification("all")


def test_all_suites_pass_by_default(full_report):
    failed = [c.name for c in full_report.checks if not c.passed]
    assert failed == []
    s = full_report.summary()
    assert s["pass"] and s["n_failed"] == 0 and s["n_checks"] == len(full_report.checks)
    assert {c.name.split("/")[0] for c in full_report.checks} == set(SUITES)


def test_report_dict_shape(full_report):
    d = full_report.as_dict()
    assert d["suite"] == "all" and d["settings"] == DEFAULT_SETTINGS
    assert set(d["checks"][0]) == {"name", "max_value", "tolerance", "pass"}


def test_single_suite_names_are_bare():
    rep = run_verification("hj")
    assert [c.name for c in rep.checks] == ["hj-residual", "conjugate-time-spread"]


def test_symmetry_breaking_parameters_fail_noether():
    rep = run_verification("noether", {"c0": 0.5})
    assert not rep.passed
    assert [c.name for c in rep.checks] == ["dilation-residual"]


def test_overrides():
    strict = run_verification("hj", tol_overrides={"hj-residual": 0.0})
    assert not strict.passed
    loose = run_verification("hj", tol_overrides={"hj/hj-residual": 1.0})
    assert loose.checks[0].tolerance == 1.0
    with pytest.raises(DomainError):
        run_verification("hj", tol_overrides={"missing": 1.0})


def test_bad_arguments():
    with pytest.raises(DomainError):
        run_verification("everything")
    with pytest.raises(DomainError):
        run_verification("hj", {"colour": 1})


def test_check_modes():
    assert Check("a", 1e-9, 1e-8).passed
    assert not Check("a", 1e-7, 1e-8).passed
    assert Check("a", 1e-3, 1e-4, "ge").passed
    assert not Check("a", 1e-5, 1e-4, "ge").passed
    assert not Check("a", float("nan"), 1.0).passed


def test_trajectories_are_seeded():
    a = random_willmore_trajectories(3, seed=7)
    b = random_willmore_trajectories(3, seed=7)
    c = random_willmore_trajectories(3, seed=8)
    for p, q in zip(a, b):
        np.testing.assert_array_equal(p.psi, q.psi)
    assert any(len(p) != len(q) or not np.array_equal(p.psi, q.psi) for p, q in zip(a, c))


def test_max_relative_drift():
    assert max_relative_drift([2.0, 2.5, np.nan, 1.0]) == pytest.approx(0.5)
    assert max_relative_drift([0.0, 1e-3]) == pytest.approx(1e-3)
