import json
import math

import numpy as np
import pytest

from asymcurve import SampledCurve, assemble_gamma, build_level1, max_deviation
from asymcurve import io
from asymcurve.cli import main
from asymcurve.construction import cached_gamma_n
from asymcurve.verify import CheckReport, RunConfig, exit_code, report_document

from conftest import circle_curve, segment_curve


# --- CSV ---------------------------------------------------------------------------


@pytest.mark.parametrize("closed", [False, True])
def test_csv_round_trip_is_exact(tmp_path, closed):
    c = circle_curve(500) if closed else build_level1(4)
    path = tmp_path / "c.csv"
    io.write_csv(c, path)
    back = io.read_csv(path)
    assert back.closed == closed
    assert np.array_equal(back.points, c.points)
    rows = path.read_text().splitlines()
    assert rows[0] == "x,y,s"
    assert len(rows) == len(c) + 1 + closed
    assert float(rows[-1].split(",")[2]) == c.total_length


@pytest.mark.parametrize("text,match", [
    ("a,b,c\n0,0,0\n1,0,1\n", "header"),
    ("x,y,s\n0,0,0\n1,zz,1\n", "row 3"),
    ("x,y,s\n0,0,0\n1,nan,1\n", "row 3"),
    ("x,y,s\n0,0,0\n", "at least 2"),
    ("x,y,s\n0,0,0\n1\n", "row 3"),
])
def test_csv_errors_name_the_row(tmp_path, text, match):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(io.CurveFormatError, match=match):
        io.read_csv(path)


def test_dumps_is_deterministic_and_strict():
    doc = {"b": [1.0, np.float64(2.5), math.nan], "a": {"z": math.inf, "y": np.int64(3)}}
    text = io.dumps(doc)
    assert text == io.dumps(dict(reversed(list(doc.items()))))
    back = json.loads(text)
    assert back == {"a": {"y": 3, "z": "inf"}, "b": [1.0, 2.5, None]}


# --- SVG ---------------------------------------------------------------------------


def test_svg_segment_has_two_coordinates(tmp_path):
    seg = SampledCurve.from_points([[0.0, 0.0], [1.0, 0.5]])
    doc = io.svg_document(seg)
    d = doc.split(' d="')[1].split('"')[0]
    assert d == "M 0.0 0.0 L 1.0 0.5"
    assert doc.count("<path") == 1


def test_svg_closed_gamma_round_trip(tmp_path):
    g = assemble_gamma(3, 2)
    path = tmp_path / "g.svg"
    io.write_svg(g, path, stroke=0.001)
    text = path.read_text()
    assert text.split(' d="')[1].split('"')[0].endswith(" Z")
    back = io.read_svg_path(path)
    assert back.closed
    assert max_deviation(back, g) <= 1e-9 * g.diameter()
    assert np.array_equal(back.points, g.points)


def test_svg_viewbox_padding():
    seg = SampledCurve.from_points([[0.0, 0.0], [2.0, 1.0]])
    doc = io.svg_document(seg)
    vb = [float(v) for v in doc.split('viewBox="')[1].split('"')[0].split()]
    assert vb == pytest.approx([-0.1, -1.05, 2.2, 1.1])
    with pytest.raises(ValueError):
        io.svg_document(seg, stroke=0)


# --- CLI ---------------------------------------------------------------------------


def test_cli_build(tmp_path, capsys):
    out = tmp_path / "g44"
    assert main(["build", "--n", "4", "--depth", "4", "--out", str(out), "--svg"]) == 0
    first = (tmp_path / "g44.csv").read_text().splitlines()[1].split(",")
    assert [float(v) for v in first] == [0.0625, 0.0, 0.0]
    assert (tmp_path / "g44.svg").exists()
    manifest = json.loads((tmp_path / "g44.json").read_text())
    assert manifest["n"] == 4 and manifest["depth"] == 4


def test_cli_build_depth1_manifest(tmp_path):
    out = tmp_path / "one.csv"
    assert main(["build", "--n", "4", "--depth", "1", "--out", str(out)]) == 0
    L = json.loads((tmp_path / "one.json").read_text())["lengths"][0]
    assert 2**-4 * (1 + 1 / 16) <= L <= 2**-4 * (1 + 4 / 16)


def test_cli_build_is_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main(["build", "--n", "3", "--depth", "3", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_cli_budget_error_exit_code(tmp_path, capsys):
    code = main(["build", "--n", "5", "--depth", "5", "--budget", "1000", "--out", str(tmp_path / "x")])
    assert code == 2
    assert "budget" in capsys.readouterr().err


def test_cli_assemble_and_export(tmp_path):
    csv = tmp_path / "gamma.csv"
    assert main(["assemble", "--n-max", "3", "--depth-cap", "2", "--out", str(csv)]) == 0
    svg = tmp_path / "gamma.svg"
    assert main(["export-svg", "--in", str(csv), "--out", str(svg), "--stroke", "0.003"]) == 0
    assert 'stroke-width="0.003"' in svg.read_text()
    assert io.read_svg_path(svg).closed


def test_cli_analyze_segment(tmp_path):
    csv = tmp_path / "seg.csv"
    io.write_csv(segment_curve(300), csv)
    out = tmp_path / "rep.json"
    assert main(["analyze", "--in", str(csv), "--deltas", "0.5,0.1,0.02", "--pairs", "3000",
                 "--epsilon", "0.01", "--n-budget", "10", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    sups = [r["sup"] for r in rep["conformality"] + rep["smoothness"]] + [rep["chordarc"]["sup"]]
    assert max(sups) == pytest.approx(1.0, abs=1e-12)


def test_cli_analyze_circle_is_deterministic(tmp_path, capsys):
    csv = tmp_path / "circle.csv"
    io.write_csv(circle_curve(4096), csv)
    args = ["analyze", "--in", str(csv), "--deltas", "0.1,0.01", "--pairs", "4000", "--seed", "3",
            "--n-budget", "50"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    rep = json.loads(first)
    at = {r["delta"]: r["sup"] for r in rep["smoothness"]}
    assert at[0.01] <= 1 + 1e-4


def test_cli_analyze_gamma_witness(tmp_path):
    csv = tmp_path / "gamma.csv"
    assert main(["assemble", "--n-max", "5", "--depth-cap", "4", "--out", str(csv)]) == 0
    out = tmp_path / "rep.json"
    deltas = [0.5, 0.25, 0.125, 2 * 2**-5]
    assert main(["analyze", "--in", str(csv), "--deltas", ",".join(map(str, deltas)), "--pairs", "4000",
                 "--epsilon", "0.05", "--n-budget", "100", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert all(r["sup"] >= 1.22 for r in rep["smoothness"])


def test_cli_analyze_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y,s\n0,0,0\n1,oops,1\n")
    assert main(["analyze", "--in", str(bad)]) == 2
    assert "row 3" in capsys.readouterr().err


def test_cli_approx(tmp_path, capsys):
    csv = tmp_path / "circle.csv"
    io.write_csv(circle_curve(4096), csv)
    assert main(["approx", "--in", str(csv), "--epsilon", "0.01", "--n-max", "100"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["n_min"] == 13 and res["found"]
    seg = tmp_path / "seg.csv"
    io.write_csv(segment_curve(), seg)
    assert main(["approx", "--in", str(seg), "--epsilon", "0.01", "--n-max", "5", "--mode", "dp",
                 "--sub", "0.1,0.6"]) == 0
    assert json.loads(capsys.readouterr().out)["n_min"] == 1
    assert main(["approx", "--in", str(seg), "--epsilon", "0.01", "--n-max", "5", "--sub", "0.1"]) == 2


def test_cli_verify_subset(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["verify", "--suite", "L1,L10", "--n", "4", "--report", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert doc["summary"]["exit_code"] == 0
    ids = [r["check_id"] for r in doc["reports"]]
    assert "L1.segment.h=0.05" in ids and "L10.n=4.witness" in ids
    for r in doc["reports"]:
        assert r["config_digest"] == doc["config_digest"]
        assert {"check_id", "paper_ref", "bound", "measured", "margin", "pass"} <= set(r)
    assert main(["verify", "--suite", "L99"]) == 2


# --- verify plumbing -----------------------------------------------------------------


def _report(status, gating=True):
    return CheckReport("x", "", 1.0, 0.0, 1.0, status == "pass", "d", gating, status)


def test_exit_codes():
    assert exit_code([_report("pass"), _report("advisory", gating=False)]) == 0
    assert exit_code([_report("pass"), _report("fail")]) == 1
    assert exit_code([_report("fail"), _report("error")]) == 2


def test_config_digest_ignores_report_path():
    a, b = RunConfig(report="a.json"), RunConfig(report="b.json")
    assert a.digest() == b.digest()
    assert RunConfig(seed=1).digest() != a.digest()
    with pytest.raises(ValueError):
        RunConfig(n=0)
    doc = report_document([_report("pass")], a)
    assert doc["config"]["report"] is None


def test_verify_never_mutates_curves():
    st = cached_gamma_n(4, 4)
    before = st.top.points.copy()
    from asymcurve.verify import run_suite

    run_suite("L3,L4,L6", RunConfig(n=4))
    assert np.array_equal(st.top.points, before)
    assert not st.top.points.flags.writeable
