import csv
import json
import math
import shutil
import subprocess

import pytest

from lgi.cli import build_parser, dumps, load_curve, main
from lgi.errors import ParseError, SpecError


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_dumps_is_deterministic_and_exact():
    from gmpy2 import mpq

    text = dumps({"b": [1, 0.1, mpq(1, 3)], "a": {"x": None}})
    assert text == dumps({"b": [1, 0.1, mpq(1, 3)], "a": {"x": None}})
    doc = json.loads(text)
    assert list(doc) == ["b", "a"]
    assert doc["b"] == [1, 0.1, "1/3"]


def test_synth_writes_tangent_graph(tmp_path, capsys):
    code, _, _ = run(["synth", "--rho=-1", "--range", "0:1", "--out", str(tmp_path)], capsys)
    assert code == 0
    rows = read_csv(tmp_path / "synth.csv")
    assert len(rows) == 21
    for row in rows:
        t = float(row["t"])
        assert float(row["S_11"]) == pytest.approx(math.tan(t), abs=1e-12)
        assert float(row["E1_0"]) == pytest.approx(math.cos(t), abs=1e-12)
    report = json.loads((tmp_path / "synth.json").read_text())
    assert report["curve"]["representation"] == "graph"
    assert report["darboux_residual"] < 1e-12


def test_analyze_reads_synth_output(tmp_path, capsys):
    run(["synth", "--rho=-1", "--out", str(tmp_path), "--ring", "rational"], capsys)
    code, _, _ = run(["analyze", "--spec", str(tmp_path / "synth.json"), "--ring", "rational", "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "analyze.json").read_text())
    assert rep["k"] == 1
    assert rep["lambda"][0][0] == "-1"
    assert rep["beta"] == ["1/3"]


def test_analyze_inline_graph_to_stdout(capsys):
    spec = json.dumps({"representation": "graph", "entries": [["t", "t^2/2"], [None, "t^3/3"]]})
    code, out, _ = run(["analyze", "--spec", spec, "--ring", "rational"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["k"] == 4
    assert rep["extension_dims"] == [2, 3, 4]
    assert rep["contraction_dims"] == [2, 1, 0]
    assert all(v == "0" for lam in rep["lambda"] for v in lam)


def test_analyze_over_a_grid(tmp_path, capsys):
    spec = json.dumps({"representation": "lambda", "entries": ["-1"]})
    code, _, _ = run(["analyze", "--spec", spec, "--range", "0:0.2", "--step", "0.1", "--out", str(tmp_path)], capsys)
    assert code == 0
    rows = read_csv(tmp_path / "analyze.csv")
    assert [float(r["t"]) for r in rows] == pytest.approx([0.0, 0.1, 0.2])
    assert all(float(r["lambda_1"]) == pytest.approx(-1.0, abs=1e-8) for r in rows)
    assert all(float(r["beta_0"]) == pytest.approx(1 / 3, abs=1e-8) for r in rows)


def test_invariants_report(capsys):
    spec = json.dumps({"representation": "graph", "entries": [["tan(t)"]]})
    code, out, _ = run(["invariants", "--spec", spec, "--probe=-1,1,2"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert list(rep) == ["t", "k", "beta", "lambda", "prop1_residual", "estimates"]
    assert rep["prop1_residual"] < 1e-9
    assert rep["estimates"][0]["C_i"] == pytest.approx(-3.0)


def test_crossratio_residuals(tmp_path, capsys):
    spec = json.dumps({"representation": "graph", "entries": [["tan(t)"]]})
    code, _, _ = run(["crossratio", "--spec", spec, "--out", str(tmp_path)], capsys)
    assert code == 0
    rows = read_csv(tmp_path / "crossratio.csv")
    assert len(rows) == 12
    for r in rows:
        assert float(r["trace"]) == pytest.approx(-1 / math.sin(float(r["t0"])) ** 2, rel=1e-10)
        assert abs(float(r["residual"])) < 1e-9


def test_roundtrip_is_byte_identical(tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        code, _, _ = run(["roundtrip", "--m", "2", "--seed", "3", "--ring", "rational", "--out", str(tmp_path / name)], capsys)
        assert code == 0
        outs.append((tmp_path / name / "roundtrip.json").read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["lambda_discrepancy"] == "0" and rep["complete"]


def test_roundtrip_with_rho(capsys):
    code, out, _ = run(["roundtrip", "--rho", "t", "--rho", "1/2", "--ring", "rational"], capsys)
    assert code == 0
    assert json.loads(out)["rho"] == ["t", "1/2"]


@pytest.mark.parametrize(
    "argv, message",
    [
        (["analyze", "--spec", '{"representation": "graph", "entries": [["sin(t"]]}'], "position"),
        (["analyze", "--spec", '{"representation": "spline", "entries": ["t"]}'], "representation"),
        (["analyze", "--spec", "{not json"], ""),
        (["roundtrip"], "needs"),
        (["roundtrip", "--rho", "1", "--m", "2"], "does not match"),
        (["nonsense"], ""),
        (["analyze", "--spec", "/nonexistent/spec.json"], ""),
        (["selftest", "--only", "12"], "no criterion"),
    ],
)
def test_bad_input_exits_one(argv, message, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert message in err


def test_math_failure_exits_two(capsys):
    # t^3 has a vanishing velocity at 0
    spec = json.dumps({"representation": "graph", "entries": [["t^3"]]})
    code, _, err = run(["analyze", "--spec", spec], capsys)
    assert code == 2
    assert "math error" in err


def test_tolerance_breach_exits_three(capsys):
    code, _, err = run(["synth", "--rho=-400", "--range", "0:2", "--step", "1"], capsys)
    assert code == 3
    assert "reduce the step" in err


def test_selftest_subset(capsys):
    code, out, _ = run(["selftest", "--only", "1,4"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2 and all("[PASS]" in line for line in lines)


def test_load_curve_variants():
    g = load_curve({"representation": "graph", "entries": [[[0, 1, 0, "1/3"]]]}, "rational")
    assert g.m == 1
    gen = load_curve({"representation": "generator", "entries": ["cos(t)", "sin(t)"]})
    assert gen.m == 1
    lam = load_curve({"representation": "lambda", "entries": ["1", "t"], "sign": -1})
    assert lam.spec.sign == -1
    with pytest.raises(ParseError):
        load_curve({"representation": "lambda", "entries": ["1 +"]})
    with pytest.raises(SpecError):
        load_curve({"representation": "graph", "m": 2, "entries": [["t"]]})


def test_parser_lists_commands():
    assert "synth" in build_parser().format_help()


@pytest.mark.skipif(shutil.which("lgi") is None, reason="console script not installed")
def test_console_script(tmp_path):
    proc = subprocess.run(
        ["lgi", "roundtrip", "--rho=-1", "--ring", "rational"], capture_output=True, text=True, timeout=300
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["complete"]
