import csv
import io
import json
import subprocess
import sys

import pytest

from fracdrift import __version__
from fracdrift.cli import main, read_config
from fracdrift.errors import DomainError


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def header(text):
    return dict(ln[2:].split(": ", 1) for ln in text.splitlines() if ln.startswith("# "))


def test_heat_poisson_value(capsys):
    code, out, _ = run(["heat", "--s", "0.5", "--n", "3", "--rho", "0", "--xn", "1"], capsys)
    assert code == 0
    row = table(out)[0]
    assert float(row["value_hankel"]) == pytest.approx(0.1591549, abs=1e-7)
    assert float(row["abs_diff"]) < 1e-8


def test_green_single_row_and_header(capsys):
    code, out, _ = run(["green", "--s", "0.3", "--b", "1", "--n", "3", "--rho", "0.5", "--xn", "-0.5"], capsys)
    assert code == 0
    rows = table(out)
    assert len(rows) == 1
    assert set(rows[0]) == {"s", "b", "n", "rho", "xn", "E", "error_estimate"}
    h = header(out)
    assert h["version"] == __version__
    assert "normalization" in h and h["command"] == "green"


def test_pole_with_series_column(capsys):
    code, out, _ = run(["pole", "--s", "0.3", "--beta", "0.01,1", "--order", "2"], capsys)
    assert code == 0
    rows = table(out)
    assert len(rows) == 2 and "small_series_y" in rows[0]


def test_phi_and_bessel_laplace(capsys):
    code, out, _ = run(["phi", "--s", "0.5", "--x", "1"], capsys)
    assert code == 0 and float(table(out)[0]["phi"]) == pytest.approx(0.2196956, abs=1e-7)
    code, out, _ = run(["bessel-laplace", "--s", "0.3", "--lam", "0.05", "--format", "json"], capsys)
    assert code == 0
    data = json.loads("\n".join(ln for ln in out.splitlines() if not ln.startswith("#")))
    assert data["columns"][3] == "quadrature" and len(data["rows"]) == 1


def test_verify_contour_suite(capsys):
    code, out, err = run(["verify", "--suite", "contour", "--s", "0.3"], capsys)
    assert code == 0
    assert "[PASS] contour" in err
    assert json.loads(out)["passed"] is True


def test_green_verify_tolerance_drives_exit(capsys):
    assert run(["green-verify", "--s", "0.3"], capsys)[0] == 0
    assert run(["green-verify", "--s", "0.3", "--tol", "1e-30"], capsys)[0] == 3


def test_domain_errors_exit_two(capsys):
    code, _, err = run(["verify", "--suite", "nope"], capsys)
    assert code == 2 and "pole" in err
    assert run(["green", "--s", "0.6", "--rho", "0.5", "--xn", "1"], capsys)[0] == 2
    assert run(["green-asym", "--s", "0.3", "--regime", "Sideways"], capsys)[0] == 2
    assert run(["heat", "--s", "0.5", "--rho", "0", "--xn", "0"], capsys)[0] == 2


def test_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# heat settings\ns = 0.5\nrho = 1\nxn = 1\n")
    code, out, _ = run(["heat", "--config", str(cfg)], capsys)
    assert code == 0
    assert float(table(out)[0]["value_subord"]) == pytest.approx(0.0562698, abs=1e-7)
    code, out, _ = run(["heat", "--config", str(cfg), "--rho", "0"], capsys)
    assert float(table(out)[0]["value_subord"]) == pytest.approx(0.1591549, abs=1e-7)
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert run(["heat", "--config", str(bad), "--s", "0.5", "--rho", "0", "--xn", "1"], capsys)[0] == 2


def test_read_config_rejects_garbage(tmp_path):
    p = tmp_path / "x.cfg"
    p.write_text("just words\n")
    with pytest.raises(DomainError):
        read_config(p)


def test_output_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["solve", "--s", "0.3", "--N", "32", "--seed", "4", "-o", str(path)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert "gain_axis" in a.read_text()


def test_flow_report(capsys):
    code, out, _ = run(["flow", "--field", "affine"], capsys)
    assert code == 0 and "straightening" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fracdrift", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
