import csv

import pytest

from ifsdyn.cli import main
from ifsdyn.io import REPORT_HEADER, Case, fmt, read_pgm, report_csv, write_pgm
from ifsdyn.metric import SpaceBox
from ifsdyn.raster import AttractorRaster


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(2) == "2"
    assert fmt(None) == ""
    assert fmt(True) == "True"


def test_pgm_orientation(tmp_path, unit2):
    r = AttractorRaster.empty(unit2, 4)
    r.bits[3, 3] = True  # top-right cell
    r.bits[0, 0] = True  # bottom-left cell
    p = tmp_path / "x.pgm"
    write_pgm(r, p)
    lines = p.read_text().splitlines()
    assert lines[:3] == ["P2", "4 4", "255"]
    data, maxval = read_pgm(p)
    assert maxval == 255
    assert data[0, 3] == 0 and data[3, 0] == 0
    assert (data == 0).sum() == 2


def test_pgm_line(tmp_path):
    r = AttractorRaster.empty(SpaceBox.unit(1), 8)
    r.bits[1] = True
    p = tmp_path / "l.pgm"
    write_pgm(r, p)
    data, _ = read_pgm(p)
    assert data.shape == (1, 8)
    assert data[0].tolist() == [255, 0] + [255] * 6


def test_report_sorted():
    text = report_csv([Case("b", True, 1.0, 2.0), Case("a", False, 0.5, None, "x")])
    rows = list(csv.reader(text.splitlines()))
    assert tuple(rows[0]) == REPORT_HEADER
    assert rows[1] == ["a", "fail", "0.5", "", "x"]
    assert rows[2][:2] == ["b", "pass"]


def test_distance(capsys, tmp_path):
    out_csv = tmp_path / "d.csv"
    code, out, _ = run(capsys, "distance", "sierpinski", "fixed", "--csv", str(out_csv))
    assert code == 0
    assert out.splitlines()[1] == "tail_bound 9.09494701773e-13"
    assert out_csv.read_text().startswith("seq1,seq2,value,tail_bound,truncation_depth\n")


def test_shift_and_classify(capsys):
    assert run(capsys, "shift", "sierpinski")[1].strip() == "(f2,f3,overline{f1})"
    assert run(capsys, "classify", "tail")[1].strip() == "EventuallyPeriodic(1,3)"
    assert run(capsys, "classify", "stream", "--horizon", "200")[1].strip() == "AperiodicUpTo(200)"


def test_evolve(capsys):
    code, out, _ = run(capsys, "evolve", "sierpinski", "--operator", "decay", "--time", "0.6931471805599453")
    assert code == 0
    assert "ratio f1 0.25" in out


def test_dimension(capsys):
    code, out, _ = run(capsys, "dimension", "sierpinski", "--operator", "decay", "--time", "0.6931471805599453")
    lines = dict(line.split(" ", 1) for line in out.splitlines())
    assert lines["s"] == "1.58496250072"
    assert lines["s_evolved_formula"] == "0.792481250361"
    assert lines["s_evolved_resolved"] == "0.792481250361"


def test_osc(capsys):
    assert run(capsys, "osc", "sierpinski")[1].strip() == "Satisfied"
    code, out, _ = run(capsys, "--scenario", "cantor", "osc", "overlap")
    assert code == 0 and out.splitlines()[0] == "Violated(1,2)"


def test_attractor_chaos_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    for path, workers in ((a, "1"), (b, "2")):
        code, _, _ = run(capsys, "attractor", "sierpinski", "--method", "chaos", "--seed", "7",
                         "--points", "100000", "--resolution", "128", "--workers", workers, "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_attractor_figure(capsys, tmp_path):
    png = tmp_path / "a.png"
    code, out, _ = run(capsys, "attractor", "cantor", "--scenario", "cantor", "--resolution", "64",
                       "--out", str(tmp_path / "c.pgm"), "--figure", str(png))
    assert code == 0 and png.stat().st_size > 0
    data, _ = read_pgm(tmp_path / "c.pgm")
    assert data.shape == (1, 64)


def test_verify_metrics(capsys, tmp_path):
    report = tmp_path / "r.csv"
    code, _, _ = run(capsys, "verify", "--suite", "metrics", "--report", str(report))
    assert code == 0
    rows = list(csv.DictReader(report.open()))
    assert rows and all(r["status"] == "pass" for r in rows)
    assert [r["case"] for r in rows] == sorted(r["case"] for r in rows)


def test_dump_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "dump")
    p = tmp_path / "s.yaml"
    p.write_text(out)
    assert run(capsys, "--scenario", str(p), "dump")[1] == out


@pytest.mark.parametrize(
    "argv, code, name",
    [
        (["evolve", "sierpinski", "--operator", "decay", "--time", "-1"], 2, "TimeOutsideDomain"),
        (["evolve", "sierpinski", "--operator", "shift", "--time", "0.5"], 2, "TimeOutsideDomain"),
        (["classify", "nope"], 2, "ValidationError"),
        (["--scenario", "nowhere", "dump"], 2, "ParseError"),
        (["frobnicate"], 2, "UsageError"),
        (["--tolerance", "2", "dump"], 2, "UsageError"),
    ],
)
def test_errors(capsys, argv, code, name):
    got, out, err = run(capsys, *argv)
    assert got == code
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith(f"error code={name} message=")


def test_bad_scenario_file(capsys, tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("space: {lower: [0], upper: [1]}\nalphabet:\n  big: {matrix: [[1.2]], offset: [0]}\n")
    code, _, err = run(capsys, "--scenario", str(p), "dump")
    assert code == 2
    assert err.startswith("error code=ValidationError")
    assert "big" in err
