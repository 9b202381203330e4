import csv
import io
import json
import os
import subprocess
import sys

import pytest

from riordan_critical.cli import main


def run_json(capsys, *argv):
    assert main(list(argv)) == 0
    return json.loads(capsys.readouterr().out)


def test_sheffer_coeffs_h3(capsys):
    doc = run_json(capsys, "sheffer", "coeffs", "--a", "1", "--b", "1", "--nmax", "3")
    assert doc["schema"] == 1
    assert doc["header"]["command"] == "sheffer coeffs"
    assert doc["rows"][3]["coeffs"] == ["0/1", "32/1", "-96/1", "64/1"]


def test_sheffer_csv(capsys):
    assert main(["sheffer", "coeffs", "--z1", "1", "--z2", "3", "--nmax", "2", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [l.split(":")[0] for l in lines[:4]] == ["# tool", "# command", "# config", "# generated"]
    assert len(list(csv.reader(io.StringIO("\n".join(lines[4:]))))) >= 3


def test_curves_endpoints(capsys):
    assert main(["analysis", "curves", "--z1", "1", "--z2", "3", "--samples", "3", "--format", "csv"]) == 0
    rows = list(csv.DictReader(l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")))
    assert float(rows[0]["re_zeta1"]) == 1.0 and float(rows[0]["re_zeta2"]) == 3.0
    last = rows[-1]
    assert float(last["im_zeta1"]) == pytest.approx(3 ** 0.5, abs=1e-12)
    assert float(last["im_phi"]) == pytest.approx(1.5707963267948966, abs=1e-12)


def test_riordan_and_combinat(capsys):
    doc = run_json(capsys, "riordan", "production", "--a", "1", "--b", "2", "--size", "5")
    assert doc["agrees_with_linear_algebra"] and doc["stieltjes_residual"] in (0, "0", "0/1")
    doc = run_json(capsys, "combinat", "tree", "--a", "1", "--b", "1", "--depth", "4")
    assert doc["all_agree"]
    doc = run_json(capsys, "combinat", "paths", "--a", "2", "--b", "3", "--nmax", "6")
    assert doc["matches_c"]


def test_zeros_verify_sweep(capsys):
    doc = run_json(capsys, "zeros", "verify", "--z1", "1", "--z2", "3", "--n", "10", "--nmax", "12")
    assert doc["n0"] == 10 and doc["exceptions"] == [] and doc["all_checks_passed"]


def test_zeros_verify_jobs_match(capsys):
    argv = ["zeros", "verify", "--a", "1", "--b", "1", "--n", "2", "--nmax", "6"]
    serial = run_json(capsys, *argv)
    parallel = run_json(capsys, *argv, "--jobs", "2")
    assert serial["n0"] == parallel["n0"] == 3
    assert serial["exceptions"] == parallel["exceptions"] == [2]
    assert serial["reports"] == parallel["reports"]


def test_zeros_count_cross_check(capsys):
    doc = run_json(capsys, "zeros", "count", "--z1", "1", "--z2", "3", "--n", "20", "--samples", "100",
                   "--cross-check")
    assert doc["count"] == doc["root_finder_on_line_upper"] == 9 and doc["consistent"]


def test_compare_saddle(capsys):
    doc = run_json(capsys, "analysis", "compare", "--z1", "1", "--z2", "3", "--n", "100", "--t", "0.3",
                   "--method", "saddle")
    assert float(doc["abs_ratio_minus_one"]) < 0.1


def test_invalid_input_exit_code(tmp_path, capsys):
    out = tmp_path / "x.json"
    for argv in (["zeros", "verify", "--z1", "1", "--z2", "3", "--n", "0"],
                 ["analysis", "curves", "--z1", "3", "--z2", "1"],
                 ["sheffer", "coeffs", "--a", "x", "--b", "1", "--nmax", "2"]):
        assert main(argv + ["-o", str(out)]) == 2
        assert not out.exists()
    assert main(["analysis", "compare", "--z1", "1", "--z2", "3", "--n", "200", "--t", "0.0",
                 "--method", "saddle"]) == 2
    capsys.readouterr()


def test_env_precision(monkeypatch, capsys):
    monkeypatch.setenv("RC_PRECISION", "32")
    assert main(["sheffer", "coeffs", "--a", "1", "--b", "1", "--nmax", "2"]) == 2
    monkeypatch.setenv("RC_PRECISION", "200")
    assert main(["sheffer", "coeffs", "--a", "1", "--b", "1", "--nmax", "2"]) == 0
    capsys.readouterr()


def strip_generated(text):
    return [l for l in text.splitlines() if "generated" not in l]


def test_output_is_reproducible(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["analysis", "curves", "--z1", "1", "--z2", "7", "--samples", "20",
                     "--format", "csv", "-o", str(p)]) == 0
    a, b = (p.read_text() for p in paths)
    assert strip_generated(a) == strip_generated(b)
    mask = os.umask(0)
    os.umask(mask)
    assert os.stat(paths[0]).st_mode & 0o777 == 0o666 & ~mask


def test_svg_output(tmp_path):
    out = tmp_path / "curves.json"
    assert main(["analysis", "curves", "--z1", "1", "--z2", "3", "--samples", "30",
                 "-o", str(out), "--svg"]) == 0
    svg = out.with_suffix(".svg")
    assert svg.exists() and svg.read_text().lstrip().startswith("<?xml")
    fig = tmp_path / "roots.svg"
    assert main(["zeros", "verify", "--z1", "1", "--z2", "3", "--n", "12", "--figure", str(fig)]) == 0
    assert "<svg" in fig.read_text()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "riordan_critical", "--version"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "riordan-critical" in proc.stdout
