import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from extsrc.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_curve_json(capsys, curve):
    code, out, _ = call(capsys, "curve", "--a", "2")
    assert code == 0
    d = json.loads(out)
    for k in ("p", "q", "z1", "z2", "rho1", "rho2"):
        assert d[k] == pytest.approx(getattr(curve, k), rel=1e-15)


def test_curve_csv(capsys):
    code, out, _ = call(capsys, "curve", "--format", "csv")
    assert code == 0 and len(rows(out)) == 1


@pytest.mark.parametrize("grid,tol", [(400, 1e-4), (4000, 1e-6)])
def test_density_integrates_to_one(capsys, grid, tol):
    code, out, _ = call(capsys, "density", "--a", "2", "--grid", str(grid))
    assert code == 0
    r = rows(out)
    assert list(r[0]) == ["x", "rho"]
    x = np.array([float(v["x"]) for v in r])
    y = np.array([float(v["rho"]) for v in r])
    assert np.all(np.diff(x) > 0)
    assert np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2) == pytest.approx(1.0, abs=tol)


def test_idempotent(capsys):
    first = call(capsys, "poly", "--n", "8", "--grid", "11")[1]
    second = call(capsys, "poly", "--n", "8", "--grid", "11")[1]
    assert first == second
    # 17 significant digits round-trip every double
    for r in rows(first):
        assert format(float(r["mantissa"]), ".17g") == r["mantissa"]


@pytest.mark.parametrize("argv,columns", [
    (["lambda", "--grid", "7"], ["x", "lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im",
                                 "lambda3_re", "lambda3_im"]),
    (["kernel", "--n", "4", "--grid", "5"], ["x", "y", "value"]),
    (["sine-test", "--n", "16", "--grid", "5"], ["x", "y", "u", "v", "value", "limit_value", "abs_error"]),
    (["airy-test", "--n", "8", "--edge", "-z2", "--grid", "5"],
     ["x", "y", "u", "v", "value", "limit_value", "abs_error"]),
    (["asymptotics", "--n", "16"], ["regime", "n", "point", "exact", "approx", "rel_error"]),
    (["zeros", "--n", "10"], ["k", "zero"]),
    (["simulate", "--n", "4", "--samples", "3", "--seed", "1"], ["sample_index", "k", "eigenvalue"]),
])
def test_csv_commands(capsys, argv, columns):
    code, out, err = call(capsys, *argv)
    assert code == 0, err
    r = rows(out)
    assert r and list(r[0]) == columns


def test_simulate_summary(capsys):
    code, out, _ = call(capsys, "simulate", "--n", "40", "--samples", "60", "--format", "json")
    assert code == 0
    assert set(json.loads(out)) == {"l1", "band_masses", "gap_fraction"}


def test_out_file(capsys, tmp_path):
    path = tmp_path / "curve.json"
    code, out, _ = call(capsys, "curve", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["z1"] > 0


@pytest.mark.parametrize("argv", [
    ["zeros", "--n", "3"],
    ["zeros", "--n", "60"],
    ["density", "--grid", "1"],
    ["sine-test", "--umin", "2", "--umax", "1"],
    ["curve", "--bogus"],
    ["airy-test", "--edge", "z5"],
    ["verify", "--criteria", "x"],
    [],
])
def test_usage_errors(capsys, tmp_path, argv):
    path = tmp_path / "out.csv"
    code, _, _ = call(capsys, *argv, "--out", str(path)) if argv else call(capsys)
    assert code == 2
    assert not path.exists()


def test_subcritical_a(capsys):
    code, _, err = call(capsys, "curve", "--a", "1")
    assert code == 1
    assert "critical" in err


def test_computation_error(capsys):
    code, _, _ = call(capsys, "sine-test", "--n", "8")
    assert code == 1


def test_verify_subset(capsys):
    code, out, _ = call(capsys, "verify", "--quick", "--criteria", "1,2")
    assert code == 0
    assert out.count("[PASS]") == 2


def test_verify_json(capsys):
    code, out, _ = call(capsys, "verify", "--quick", "--criteria", "1", "--format", "json")
    assert code == 0
    assert json.loads(out)[0]["passed"] is True


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "extsrc", "curve"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "z1" in json.loads(res.stdout)
