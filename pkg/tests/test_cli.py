import json
import math

import pytest

from bandsolve.cli import EXIT_CHECK, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from bandsolve.export import load_profile, read_obj


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_solve_ivp(capsys):
    code, doc, err = run(capsys, "solve-ivp", "--kappa", "1", "--u0", "1", "--rmax", "1")
    assert code == EXIT_OK and doc["passed"]
    assert doc["u_end"] == pytest.approx(1.4322860173007668, abs=1e-10)
    assert "PASS" in err


def test_solve_ivp_lambda_frame(capsys, tmp_path):
    out = tmp_path / "p.json"
    code, doc, _ = run(capsys, "solve-ivp", "--kappa", "1", "--u0", "0.5", "--lam", "2", "--rmax", "1", "--out", str(out))
    assert code == EXIT_OK and doc["shift"] == 2.0
    p = load_profile(out)
    assert p.params.u0 == 2.5 and json.loads(out.read_text())["params"]["shift"] == 2.0


def test_solve_bvp(capsys):
    code, doc, _ = run(capsys, "solve-bvp", "--a", "1", "--beta", "1", "--kappa", "1")
    assert code == EXIT_OK
    assert doc["u0"] == pytest.approx(1.0204704268245741, abs=1e-9)
    assert doc["branch"] == "sessile" and doc["checks"]["young"]


def test_env_fallback_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("BANDSOLVE_KAPPA", "2")
    code, doc, _ = run(capsys, "solve-bvp", "--a", "1", "--beta", "1")
    assert code == EXIT_OK and doc["problem"]["kappa"] == 2.0
    code, doc, _ = run(capsys, "solve-bvp", "--a", "1", "--beta", "1", "--kappa", "1")
    assert doc["problem"]["kappa"] == 1.0


def test_bad_env_value(capsys, monkeypatch):
    monkeypatch.setenv("BANDSOLVE_KAPPA", "abc")
    code, _, err = run(capsys, "solve-bvp", "--a", "1", "--beta", "1")
    assert code == EXIT_USAGE and "BANDSOLVE_KAPPA" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["solve-ivp", "--kappa", "1"],
        ["solve-ivp", "--kappa", "0", "--u0", "1", "--rmax", "1"],
        ["foliate", "--a", "1", "--b", "1", "--kappa", "-1"],
        ["compare", "--mode", "kappa", "--u0", "1"],
        ["pendent", "--kappa", "1", "--u0", "1"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_numeric_failure(capsys):
    # the only root crosses zero before r=a, off the negative branch
    code, _, err = run(capsys, "solve-bvp", "--a", "2", "--beta", "1", "--kappa", "-1")
    assert code == EXIT_NUMERIC and "numeric failure" in err


def test_large_height_pendent(capsys):
    code, doc, _ = run(capsys, "solve-bvp", "--a", "0.1", "--beta", "5", "--kappa", "-1")
    assert code == EXIT_OK and doc["u0"] < -700


def test_foliate(capsys):
    code, doc, _ = run(capsys, "foliate", "--a", "2", "--b", "3", "--kappa", "1")
    assert code == EXIT_OK and doc["u0"] == pytest.approx(1.51202436769249, abs=1e-9)


def test_pendent(capsys):
    code, doc, err = run(capsys, "pendent", "--kappa", "-1", "--u0", "-1")
    assert code == EXIT_OK
    assert doc["max_slope_formula"] == pytest.approx(math.sqrt(5) / 3)
    assert doc["r_o"] == pytest.approx(1.8451711373602895, abs=1e-8)
    assert "r_o" in err


def test_bounds(capsys):
    code, doc, _ = run(capsys, "bounds", "--a", "1", "--beta", "1", "--kappa", "1")
    assert code == EXIT_OK and doc["passed"] and len(doc["records"]) == 13


def test_bounds_negative_beta_note(capsys):
    code, doc, _ = run(capsys, "bounds", "--a", "1", "--beta", "-1", "--kappa", "1")
    assert code == EXIT_OK and "note" in doc


@pytest.mark.parametrize(
    "extra",
    [
        ["--mode", "kappa", "--u0", "1", "--k1", "0.5", "--k2", "1"],
        ["--mode", "u0", "--kappa", "1", "--u0", "0.5", "--delta", "0.2"],
        ["--mode", "kappa-bvp", "--a", "1", "--beta", "1", "--k1", "0.5", "--k2", "2"],
    ],
)
def test_compare(capsys, extra):
    code, doc, _ = run(capsys, "compare", *extra)
    assert code == EXIT_OK and doc["min_slack"] > 0


def test_export_mesh(capsys, tmp_path):
    out = tmp_path / "m.obj"
    code, doc, _ = run(capsys, "export-mesh", "--kappa", "1", "--u0", "1", "--rmax", "2", "--out", str(out), "--n-rulings", "101")
    assert code == EXIT_OK and doc["checks"]["rulings_horizontal"]
    mesh = read_obj(out)
    assert mesh.n_rulings == 101 and mesh.vertices[0, 0] == -2.0
    assert doc["curvature_residual"] < 1e-2


def test_plot(capsys, tmp_path):
    out = tmp_path / "p.svg"
    code, _, _ = run(capsys, "plot", "--kappa", "1", "--a", "1", "--beta", "1", "--out", str(out))
    assert code == EXIT_OK and out.read_text().count("<path") > 3


def test_sweep(capsys, tmp_path):
    out = tmp_path / "s.json"
    code, doc, _ = run(capsys, "sweep", "--a", "0.5", "1", "--beta", "1", "--kappa", "1", "-1", "--out", str(out))
    assert code == EXIT_OK and len(doc["rows"]) == 4
    assert json.loads(out.read_text()) == doc["rows"]


def test_sweep_reports_failure(capsys):
    code, doc, _ = run(capsys, "sweep", "--a", "2", "--beta", "1", "--kappa", "-1", "--workers", "2")
    assert code == EXIT_CHECK and "error" in doc["rows"][0]
