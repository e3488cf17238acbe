import csv
import io
import json
import math
import subprocess
import sys

import pytest

from zenolab.cli import main


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def table(text):
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(rows))))


def provenance(text):
    pairs = [line[2:].split("=", 1) for line in text.splitlines() if line.startswith("# ") and "=" in line]
    return {k: json.loads(v) for k, v in pairs}


def test_curve_qm_gaussian(capsys):
    status, out, _ = run(capsys, "curve", "--model", "qm", "--density", "gaussian:0,1",
                         "--tmin", "0", "--tmax", "3", "--points", "4")
    assert status == 0
    rows = table(out)
    assert list(rows[0]) == ["t", "P", "converged"]
    for row, n in zip(rows, range(4)):
        assert float(row["P"]) == pytest.approx(math.exp(-n * n), rel=1e-14)
        assert row["converged"] == "true"
    meta = provenance(out)
    assert meta["density"] == "gaussian:0,1" and meta["rel-tol"] == 1e-10 and meta["abs-tol"] == 1e-13


def test_curve_model_a_free(capsys):
    status, out, _ = run(capsys, "curve", "--model", "a", "--lambda", "0", "--tmax", "5", "--points", "6")
    assert status == 0
    assert {float(r["P"]) for r in table(out)} == {1.0}


def test_curve_model_b_requires_cutoff(capsys):
    status, _, err = run(capsys, "curve", "--model", "b")
    assert status == 64 and "cutoff" in err
    status, out, _ = run(capsys, "curve", "--model", "b", "--cutoff", "50", "--points", "3")
    assert status == 0 and float(table(out)[0]["P"]) == 1.0


def test_gamma(capsys):
    status, out, _ = run(capsys, "gamma", "--model", "a", "--mi", "1", "--ma", "0.3", "--mb", "0.5",
                         "--lambda", "1", "--format", "json")
    doc = json.loads(out)
    assert status == 0
    assert doc["summary"]["gamma_closed"] == pytest.approx(0.0252622, abs=1e-6)
    assert doc["summary"]["rel_discrepancy"] < 1e-6
    status, out, _ = run(capsys, "gamma", "--model", "b", "--format", "json")
    assert json.loads(out)["summary"]["gamma_closed"] == pytest.approx(0.0091167, abs=1e-6)


def test_gamma_below_threshold(capsys):
    status, _, err = run(capsys, "gamma", "--model", "a", "--ma", "0.6", "--mb", "0.5")
    assert status == 65 and "channel closed" in err


def test_scan_cutoff(capsys):
    status, out, _ = run(capsys, "scan-cutoff", "--model", "b", "--time", "1")
    meta = provenance(out)
    assert status == 0
    assert meta["result.classification"] == "Linear"
    assert meta["result.fitted_slope"] == pytest.approx(-0.01267, rel=0.05)
    assert len(table(out)) == 8


def test_scan_cutoff_zero_time(capsys):
    status, out, _ = run(capsys, "scan-cutoff", "--model", "b", "--time", "0", "--format", "json")
    doc = json.loads(out)
    assert status == 0 and doc["summary"]["classification"] == "Convergent"
    assert set(doc["samples"]["xi3"]) == {0.0}


def test_scan_cutoff_errors(capsys):
    assert run(capsys, "scan-cutoff", "--model", "b", "--cutoffs", "1e3,3e3,1e4")[0] == 64
    assert run(capsys, "scan-cutoff", "--model", "a")[0] == 64


def test_zeno_defaults(capsys):
    status, out, _ = run(capsys, "zeno", "--format", "json")
    doc = json.loads(out)
    assert status == 0
    exps = dict(zip(doc["samples"]["model"], doc["samples"]["exponent"]))
    assert exps["a"] == pytest.approx(1.0, abs=0.05)
    assert exps["qm"] == pytest.approx(2.0, abs=0.02)
    assert doc["summary"] == {"a_verdict": "linear", "qm_verdict": "quadratic"}


def test_zeno_no_decay(capsys):
    _, out, _ = run(capsys, "zeno", "--density", "point:1", "--format", "json")
    assert json.loads(out)["summary"]["qm_verdict"] == "no decay"
    _, out, _ = run(capsys, "zeno", "--lambda", "0", "--format", "json")
    assert json.loads(out)["summary"]["a_verdict"] == "no decay"


@pytest.mark.parametrize("argv", [
    ["curve", "--points", "1"],
    ["curve", "--tmin", "2", "--tmax", "1"],
    ["curve", "--tmin", "-1"],
    ["curve", "--model", "qm", "--density", "lorentz:0,1"],
    ["curve", "--model", "c"],
    ["curve", "--bogus"],
    [],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 64


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# reference run\nmodel = qm\ndensity = gaussian:0,2\npoints = 3\ntmax = 1\n")
    _, out, _ = run(capsys, "curve", "--config", str(cfg))
    assert float(table(out)[-1]["P"]) == pytest.approx(math.exp(-4), rel=1e-14)
    _, out, _ = run(capsys, "curve", "--config", str(cfg), "--density", "gaussian:0,1")
    assert float(table(out)[-1]["P"]) == pytest.approx(math.exp(-1), rel=1e-14)
    assert len(table(out)) == 3
    cfg.write_text("colour = blue\n")
    assert run(capsys, "curve", "--config", str(cfg))[0] == 64


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.csv"
    assert run(capsys, "curve", "--model", "qm", "--out", str(path))[0] == 0
    assert path.read_text().splitlines()[0] == "# zenolab curve"


def test_density_file(tmp_path, capsys):
    dens = tmp_path / "d.txt"
    dens.write_text("0 0\n1 1\n2 0\n")
    status, out, _ = run(capsys, "zeno", "--density", f"file:{dens}", "--format", "json")
    assert status == 0 and json.loads(out)["summary"]["qm_verdict"] == "quadratic"


def test_byte_identical_runs(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("model = a\nmi = 1\nma = 0.3\nmb = 0.5\nlambda = 0.1\ntmax = 20\npoints = 9\n")
    outputs = [subprocess.run([sys.executable, "-m", "zenolab", "curve", "--config", str(cfg)],
                              capture_output=True, check=True).stdout for _ in range(2)]
    assert outputs[0] == outputs[1] and outputs[0]
