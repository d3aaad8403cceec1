import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axishape import catalog as C
from axishape.errors import DomainError
from axishape.geometry import ModelParams, State
from axishape.io import (
    COLUMNS,
    profile_from_csv,
    profile_to_csv,
    read_profile,
    report_to_json,
    write_profile,
    write_report,
)
from axishape.shape_eq import integrate
from axishape.willmore import quadrature_profile


def _same(a, b):
    for c in COLUMNS:
        np.testing.assert_array_equal(getattr(a, c), getattr(b, c))
    assert (a.chart, a.branch_sign, a.termination) == (b.chart, b.branch_sign, b.termination)
    assert np.isnan(a.rho0) and np.isnan(b.rho0) or a.rho0 == b.rho0
    assert a.params == b.params


@pytest.mark.parametrize("make", [
    lambda: integrate(State(1.0, 0.2, 0.3), (1.0, 1.8), ModelParams(0.1, 0.2, -0.1, 0.05, kc=2.0), 1e-9),
    lambda: quadrature_profile(0.4, 1.3, -1, (0.3, 1.4), 17),
    lambda: C.catalog_profile(C.make_entry("catenoid", n=9))[0],
], ids=["integrated", "quadrature", "catalog"])
def test_csv_round_trip_is_exact(make, tmp_path):
    prof = make()
    text = profile_to_csv(prof)
    back = profile_from_csv(text)
    _same(prof, back)
    assert profile_to_csv(back) == text
    path = tmp_path / "p.csv"
    write_profile(prof, path)
    _same(read_profile(path), prof)


def test_csv_layout():
    prof = quadrature_profile(0.0, 1.0, 1, (0.5, 1.0), 3)
    lines = profile_to_csv(prof).splitlines()
    assert lines[0].startswith("# chart=psi;branch_sign=1;rho0=1;")
    assert lines[1] == ",".join(COLUMNS)
    assert len(lines) == 5
    # NaN columns are written as empty fields
    cat = profile_to_csv(C.catalog_profile(C.make_entry("sphere", n=3))[0]).splitlines()
    assert cat[2].split(",")[COLUMNS.index("omega_eff")] == ""


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=True, allow_infinity=False, width=64), min_size=2, max_size=6))
def test_float_fields_round_trip(values):
    from axishape.geometry import Profile

    n = len(values)
    t = np.arange(n, dtype=float)
    prof = Profile("rho", t + 1.0, t + 1.0, np.asarray(values), np.asarray(values), t, I=np.asarray(values))
    back = profile_from_csv(profile_to_csv(prof))
    np.testing.assert_array_equal(back.psi, prof.psi)
    np.testing.assert_array_equal(back.I, prof.I)


def test_csv_errors():
    with pytest.raises(DomainError):
        profile_from_csv("t,rho\n1,2\n")
    with pytest.raises(DomainError):
        profile_from_csv("# chart=rho\nx,y\n")
    with pytest.raises(DomainError):
        profile_from_csv("# chart\n" + ",".join(COLUMNS) + "\n")


def test_report_json_is_deterministic(tmp_path):
    rep = {"b": np.float64(1.5), "a": [np.bool_(True), np.int64(3), float("nan")], "z": {"y": np.inf}}
    text = report_to_json(rep)
    assert text == report_to_json(dict(reversed(list(rep.items()))))
    assert json.loads(text) == {"a": [True, 3, None], "b": 1.5, "z": {"y": None}}
    assert "metadata" not in json.loads(text)
    stamped = json.loads(report_to_json(rep, timestamp="2026-01-01T00:00:00Z"))
    assert stamped["metadata"] == {"timestamp": "2026-01-01T00:00:00Z"}
    path = tmp_path / "r.json"
    write_report(rep, path)
    assert path.read_text() == text
