import json
import shutil
import subprocess

import numpy as np
import pytest

from axishape.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, catalog_request, main, parse_kv_list, read_config
from axishape.io import profile_from_csv, read_profile


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- solve


def test_solve_writes_csv_to_stdout(capsys):
    code, out, err = run(capsys, "solve", "--rho0", "1", "--psi0", "0.2", "--dpsi0", "0.1", "--rho-end", "1.5")
    assert code == EXIT_OK
    prof = profile_from_csv(out)
    assert prof.rho[0] == 1.0 and prof.rho[-1] == pytest.approx(1.5)
    assert "termination=span-end" in err


def test_solve_sphere_against_closed_form(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "solve", "--rho0", "0.5", "--psi0", str(np.arcsin(0.5)),
                     "--dpsi0", str(1 / np.sqrt(0.75)), "--rho-end", "0.9", "--out", str(out))
    assert code == EXIT_OK
    prof = read_profile(out)
    np.testing.assert_allclose(prof.psi, np.arcsin(prof.rho), atol=1e-8)


def test_solve_is_deterministic(capsys):
    argv = ("solve", "--c0", "0.3", "--lambda-t", "0.1", "--psi0", "0.1", "--rho-end", "1.7")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_solve_bad_domain_is_usage_error(capsys):
    assert run(capsys, "solve", "--rho0", "-1")[0] == EXIT_USAGE


def test_solve_numerical_failure_exits_one(capsys):
    # a huge slope cannot be integrated before the step budget runs out of precision
    code, _, err = run(capsys, "solve", "--dpsi0", "1e200", "--rho-end", "3")
    assert code == EXIT_FAIL
    assert "error" in err or "numerical" in err


# -- willmore


def test_willmore_single_and_multiple(capsys, tmp_path):
    code, out, _ = run(capsys, "willmore", "--I", "0", "--sign", "-1", "--n", "5", "--psi-end", "1.2")
    assert code == EXIT_OK
    prof = profile_from_csv(out)
    np.testing.assert_allclose(prof.rho, np.sin(prof.psi), atol=1e-12)
    d = tmp_path / "fam"
    code, _, _ = run(capsys, "willmore", "--I", "-0.3", "0", "0.5", "--psi-start", "0.8", "--out", str(d))
    assert code == EXIT_OK
    assert sorted(p.name for p in d.iterdir()) == ["willmore_I+0.5.csv", "willmore_I+0.csv", "willmore_I-0.3.csv"]


def test_willmore_multiple_needs_directory(capsys):
    assert run(capsys, "willmore", "--I", "0", "1")[0] == EXIT_USAGE


def test_willmore_outside_branch_domain(capsys):
    assert run(capsys, "willmore", "--I", "-1", "--psi-start", "0.2")[0] == EXIT_USAGE


# -- catalog


def test_catalog_check_and_report(capsys, tmp_path):
    rep = tmp_path / "r.json"
    code, out, _ = run(capsys, "catalog", "--name", "sphere", "--params", "R=2,lambda=0.5", "--check",
                       "--report", str(rep))
    assert code == EXIT_OK and "PASS" in out
    body = json.loads(rep.read_text())
    assert body["constraint_ok"] and body["shape"]["R"] == 2.0


def test_catalog_constraint_violation(capsys):
    code, out, err = run(capsys, "catalog", "--name", "sphere", "--params", "R=1,p=0.3", "--check")
    assert code == EXIT_FAIL and "FAIL" in out and "warning" in err


def test_catalog_cylinder_orientation(capsys):
    assert run(capsys, "catalog", "--name", "cylinder", "--params", "R=2,orientation=-1", "--check")[0] == EXIT_OK


def test_catalog_usage_errors(capsys):
    assert run(capsys, "catalog")[0] == EXIT_USAGE
    assert run(capsys, "catalog", "--name", "sphere", "--params", "bogus=1")[0] == EXIT_USAGE
    assert run(capsys, "catalog", "--name", "sphere", "--params", "R")[0] == EXIT_USAGE
    assert run(capsys, "catalog", "--name", "sphere", "--params", "R=abc")[0] == EXIT_USAGE
    assert run(capsys, "catalog", "--name", "ellipsoid")[0] == EXIT_USAGE


def test_catalog_request_splits_keys():
    entry, params = catalog_request("sphere", "R=2,lambda=0.5,kc=2")
    assert entry.shape == {"R": 2.0}
    assert params.kc == 2.0 and params.lam == pytest.approx(0.5)
    assert entry.constraint(params) == pytest.approx(0.0, abs=1e-14)


# -- verify


def test_verify_suite_passes_and_reports(capsys, tmp_path):
    rep = tmp_path / "v.json"
    code, out, _ = run(capsys, "verify", "--suite", "hj", "--report", str(rep))
    assert code == EXIT_OK
    assert out.count("PASS") == 2
    body = json.loads(rep.read_text())
    assert body["summary"]["pass"] and "metadata" not in body
    first = rep.read_text()
    run(capsys, "verify", "--suite", "hj", "--report", str(rep))
    assert rep.read_text() == first


def test_verify_broken_configuration(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--suite", "noether", "--c0", "0.5")
    assert code == EXIT_FAIL and "FAIL" in out
    rep = tmp_path / "b.json"
    code, out, _ = run(capsys, "verify", "--suite", "noether", "--c0", "0.5", "--expect-broken",
                       "--report", str(rep), "--timestamp", "T0")
    assert code == EXIT_OK and "expected failure observed" in out
    body = json.loads(rep.read_text())
    assert body["summary"]["expect_broken"] and body["metadata"] == {"timestamp": "T0"}
    assert run(capsys, "verify", "--suite", "hj", "--expect-broken")[0] == EXIT_FAIL


def test_verify_tolerance_overrides(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "hj", "--tol-overrides", "hj-residual=0")
    assert code == EXIT_FAIL
    code, _, _ = run(capsys, "verify", "--suite", "hj", "--tol-overrides", "hj/conjugate-time-spread=1")
    assert code == EXIT_OK
    assert run(capsys, "verify", "--suite", "hj", "--tol-overrides", "nope=1")[0] == EXIT_USAGE


# -- series


def test_series_output(capsys):
    code, out, _ = run(capsys, "series", "--n", "60", "--sin-psi", "0.5", "0")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "sin_psi,sqrt_sec_series,sqrt_sec_exact,int_sqrt_cos_series"
    x, a, b, c = map(float, lines[1].split(","))
    assert (x, round(a, 7)) == (0.5, 1.0745699) and a == pytest.approx(b, abs=1e-15)
    assert lines[2] == "0,1,1,0"


# -- config files and usage


def test_config_file_supplies_flags(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sphere start\ncommand = willmore\nI = 0\nsign=-1\n--psi-end=1.2\nn = 4\n")
    code, out, _ = run(capsys, "--config", str(cfg))
    assert code == EXIT_OK
    assert len(profile_from_csv(out)) == 4
    # explicit flags win over the file
    code, out, _ = run(capsys, "willmore", "--n", "6", f"--config={cfg}")
    assert code == EXIT_OK and len(profile_from_csv(out)) == 6


def test_config_underscore_keys_and_lists(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("sin_psi = 0.1, 0.2 0.3\n")
    code, out, _ = run(capsys, "series", "--config", str(cfg))
    assert code == EXIT_OK and len(out.splitlines()) == 4


@pytest.mark.parametrize("text", ["bogus = 1\n", "n = many\n", "just words\n", "check = maybe\n"])
def test_bad_config_is_usage_error(tmp_path, capsys, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    cmd = "catalog" if "check" in text else "series"
    assert run(capsys, cmd, "--config", str(cfg))[0] == EXIT_USAGE


def test_read_config_parses_comments(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("\n# note\nrho_end = 3  # trailing\n--tol=1e-8\n")
    assert read_config(cfg) == {"rho-end": "3", "tol": "1e-8"}


def test_usage_errors(capsys):
    assert run(capsys)[0] == EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "solve", "--tol")[0] == EXIT_USAGE
    assert run(capsys, "--config", "/nonexistent/file.cfg", "solve")[0] == EXIT_USAGE
    assert run(capsys, "solve", "--config")[0] == EXIT_USAGE
    assert run(capsys, "--help")[0] == EXIT_OK


def test_parse_kv_list():
    assert parse_kv_list(" a = 1 , b=x=y,") == {"a": "1", "b": "x=y"}


@pytest.mark.skipif(shutil.which("axishape") is None, reason="console script not installed")
def test_console_script_exit_codes():
    ok = subprocess.run(["axishape", "series", "--sin-psi", "0.2"], capture_output=True, text=True)
    assert ok.returncode == 0 and ok.stdout.startswith("sin_psi")
    bad = subprocess.run(["axishape", "solve", "--rho0", "x"], capture_output=True, text=True)
    assert bad.returncode == 2
