import csv
import json
import math

import numpy as np
import pytest

from varode.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, ConfigError, load_config, main
from varode.exact import pauli_family


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def column(path, name):
    header, rows = read_csv(path)
    i = header.index(name)
    return np.array([float(r[i]) if r[i] else np.nan for r in rows])


def write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


@pytest.mark.slow
def test_table_three(tmp_path):
    out = tmp_path / "t3.csv"
    assert main(["table", "--id", "3", "--out", str(out)]) == EXIT_OK
    header, rows = read_csv(out)
    assert header == ["n", "lambda_exact", "lambda_approx", "rel_error_percent"]
    assert len(rows) == 5
    n, ex, ap, pct = rows[3]
    assert n == "4"
    assert abs(float(ex) - 204.856) / 204.856 < 5e-4
    assert abs(float(ap) - 204.952) / 204.952 < 5e-3
    assert float(pct) == pytest.approx(0.05, abs=0.03)


def test_figure_one(tmp_path):
    out = tmp_path / "f1.csv"
    assert main(["figure", "--id", "1", "--out", str(out)]) == EXIT_OK
    header, rows = read_csv(out)
    assert header == ["t", "y_oracle", "y_first_order", "y_corrected"]
    assert len(rows) == 601
    assert [float(v) for v in rows[0]] == [0.0, 1.0, 1.0, 1.0]
    t = column(out, "t")
    assert t[-1] == 6.0


def test_figure_four_flags_turning_point(tmp_path):
    out = tmp_path / "f4.csv"
    assert main(["figure", "--id", "4", "--out", str(out)]) == EXIT_OK
    t = column(out, "t")
    fo = column(out, "y_first_order")
    wk = column(out, "y_wkb")
    i = int(np.argmin(np.abs(t - math.pi / 2)))
    assert t[i] == pytest.approx(math.pi / 2, abs=1e-15)
    assert np.isfinite(fo[i]) and np.all(np.isfinite(fo))
    assert np.isnan(wk[i])
    assert np.isnan(wk).sum() == 2


def test_solve_scalar_constant_f(tmp_path):
    cfg = write_json(
        tmp_path / "c.json",
        {"kind": "scalar-ode", "f": "1", "initial": [1, 0], "grid": {"start": 0, "stop": 1, "num": 5},
         "methods": ["first-order"]},
    )
    out = tmp_path / "o.csv"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == EXIT_OK
    t = column(out, "t")
    assert np.abs(column(out, "y_first_order") - np.cosh(t)).max() < 1e-8
    assert np.abs(column(out, "y_oracle") - np.cosh(t)).max() < 1e-9


def test_solve_scalar_general_order(tmp_path):
    cfg = write_json(
        tmp_path / "c.json",
        {"kind": "scalar-ode", "coefficients": ["-(1+t)", 0, 0], "initial": [1, 0, 0],
         "grid": {"times": [0, 0.25, 0.5]}, "methods": ["first-order", "corrected"]},
    )
    out = tmp_path / "o.csv"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == EXIT_OK
    header, rows = read_csv(out)
    assert header == ["t", "y_oracle", "y_first_order", "y_corrected"]
    assert len(rows) == 3


def test_solve_system_exact_class(tmp_path):
    M = pauli_family(1, 1j, 0, 1).to_json()
    cfg = write_json(
        tmp_path / "s.json",
        {"kind": "system", "matrix": M, "initial": [1, 0], "grid": {"start": 0, "stop": 1, "num": 6},
         "methods": ["exact-class", "taylor"], "rel_tol": 1e-12},
    )
    out = tmp_path / "o.csv"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == EXIT_OK
    for part in ("re0", "im0", "re1", "im1"):
        orc = column(out, f"oracle_{part}")
        assert np.abs(column(out, f"exact_class_{part}") - orc).max() < 1e-8
        assert np.abs(column(out, f"taylor_{part}") - orc).max() < 1e-8


def test_solve_eigen_mixed(tmp_path):
    cfg = write_json(
        tmp_path / "e.json", {"kind": "eigen", "family": "mixed", "range": [1, 50], "step": 1.0}
    )
    out = tmp_path / "o.csv"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == EXIT_OK
    ex = column(out, "lambda_exact")
    ap = column(out, "lambda_approx")
    assert abs(ex[0] - 5.122) / 5.122 < 5e-4
    assert abs(ap[1] - 39.836) / 39.836 < 5e-3


def test_check_prints_report(tmp_path, capsys):
    path = write_json(tmp_path / "m.json", pauli_family(1, 1j, 0, 1).to_json())
    assert main(["check", "--matrix", path]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["class"] == "linear-class"
    airy = {"n": 2, "entries": [[[0], [1]], [[0, 1], [0]]]}
    path = write_json(tmp_path / "a.json", airy)
    assert main(["check", "--matrix", path]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["class"] == "none"


def test_quantum_outputs(tmp_path):
    cfg = write_json(
        tmp_path / "q.json",
        {"kind": "quantum", "hamiltonian": {"name": "landau_zener"}, "psi0": [1, 0],
         "grid": {"start": 0, "stop": 2, "num": 3}, "trotter_N": 512, "convergence_N": [256, 512, 1024]},
    )
    out = tmp_path / "amp.csv"
    assert main(["quantum", "--config", cfg, "--out", str(out)]) == EXIT_OK
    header, rows = read_csv(out)
    assert "trotter_re0" in header and "corrected_im1" in header and header[-1] == "validity_ratio"
    conv = tmp_path / "amp_convergence.csv"
    header, rows = read_csv(conv)
    assert header == ["N", "error", "ratio", "norm_deviation"]
    ratios = [float(r[2]) for r in rows[1:]]
    assert all(1.7 < r < 2.3 for r in ratios)
    assert all(float(r[3]) < 1e-12 for r in rows)


def test_config_errors_exit_2(tmp_path, capsys):
    bad = write_json(tmp_path / "b.json", {"kind": "scalar-ode", "f": "1", "initial": [1, 0], "grid": {"start": 0}})
    assert main(["solve", "--config", bad, "--out", str(tmp_path / "o.csv")]) == EXIT_CONFIG
    assert "grid" in capsys.readouterr().err
    unbound = write_json(
        tmp_path / "u.json", {"kind": "scalar-ode", "f": "k*t+1", "initial": [1, 0], "grid": {"times": [0, 1]}}
    )
    assert main(["solve", "--config", unbound, "--out", str(tmp_path / "o.csv")]) == EXIT_CONFIG
    assert main(["solve", "--config", str(tmp_path / "missing.json"), "--out", "x"]) == EXIT_CONFIG
    (tmp_path / "junk.json").write_text("{not json")
    assert main(["check", "--matrix", str(tmp_path / "junk.json")]) == EXIT_CONFIG


def test_load_config_reports_field_path(tmp_path):
    path = write_json(
        tmp_path / "c.json",
        {"kind": "system", "matrix": {"n": 12, "entries": []}, "initial": [1], "grid": {"times": [0]}},
    )
    with pytest.raises(ConfigError, match="matrix/n"):
        load_config(path)


def test_numerical_failure_exit_3(tmp_path, capsys):
    cfg = write_json(
        tmp_path / "w.json",
        {"kind": "scalar-ode", "f": "cos(t)^2", "initial": [1, 0], "grid": {"start": 0, "stop": 2, "num": 5},
         "methods": ["wkb-form"]},
    )
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o.csv")]) == EXIT_NUMERIC
    assert "TurningPointError" in capsys.readouterr().err
    airy = write_json(
        tmp_path / "s.json",
        {"kind": "system", "matrix": {"n": 2, "entries": [[[0], [1]], [[0, 1], [0]]]}, "initial": [1, 0],
         "grid": {"times": [0.5]}, "methods": ["exact-class"]},
    )
    assert main(["solve", "--config", airy, "--out", str(tmp_path / "o.csv")]) == EXIT_NUMERIC


def test_output_is_deterministic(tmp_path):
    cfg = write_json(
        tmp_path / "c.json",
        {"kind": "scalar-ode", "f": "-sqrt(t+1)", "initial": [1, 0], "grid": {"start": 0, "stop": 3, "num": 7},
         "methods": ["first-order", "corrected", "wkb"]},
    )
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["solve", "--config", cfg, "--out", str(a)]) == EXIT_OK
    assert main(["solve", "--config", cfg, "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_help_documents_defaults(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    assert "VARODE_PANELS" in out and "exit codes" in out
