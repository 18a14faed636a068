import csv
import io

import numpy as np
import pytest

from thermograph.cli import main, parse_number
from thermograph.graph import rose, write_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_entropy_rose(capsys):
    code, out, _ = run(capsys, "entropy", "--family", "rose:2", "--len", "1,1")
    assert code == 0
    assert out.splitlines()[0] == "1.0986122886681098"


def test_entropy_theta(capsys):
    code, out, _ = run(capsys, "entropy", "--family", "theta:2", "--len", "1,1,1")
    assert abs(float(out.splitlines()[0]) - np.log(2)) < 1e-10


def test_entropy_graph_file(capsys, tmp_path):
    path = tmp_path / "g.txt"
    write_graph(path, rose(3), [1.0, 1.0, 1.0])
    code, out, _ = run(capsys, "entropy", "--graph-file", str(path))
    assert code == 0
    assert float(out.splitlines()[0]) == pytest.approx(np.log(5))


@pytest.mark.parametrize("argv, code", [
    (["entropy", "--family", "rose:2", "--len", "1,x"], 2),
    (["entropy", "--family", "rose:2", "--len", "1,1,1"], 2),
    (["entropy", "--family", "rose:2", "--len=-1,1"], 2),
    (["entropy", "--family", "nope", "--len", "1"], 2),
    (["verify", "--suite", "nope"], 2),
    (["experiment", "thin-part", "--r", "3", "--i", "7"], 2),
    (["experiment", "shortcut", "--family", "barbell", "--bridge", "c"], 2),
    (["experiment", "escape-rose", "--tmax", "import os"], 2),
])
def test_errors(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err


@pytest.mark.parametrize("text, value", [("1-1e-8", 1 - 1e-8), ("2^-3", 0.125), ("0.5", 0.5),
                                         ("-(2*3)", -6.0)])
def test_parse_number(text, value):
    assert parse_number(text) == value


def test_escape_rose_csv(capsys):
    code, out, _ = run(capsys, "experiment", "escape-rose", "--r", "3", "--tmax", "1-1e-8")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert 0 < float(rows[0]["length"]) <= float(rows[0]["envelope"])
    assert len(rows[0]["config_hash"]) == 16


def test_thin_part_decreasing(capsys):
    code, out, _ = run(capsys, "experiment", "thin-part", "--r", "3", "--i", "1", "--eps",
                       "0.25,0.125", "--samples", "6")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["diameter_bound"]) > float(rows[1]["diameter_bound"])


def test_shortcut_decreasing(capsys):
    code, out, _ = run(capsys, "experiment", "shortcut", "--delta", "0.1,0.01")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["total"]) > float(rows[1]["total"])


def test_verify_spectral(capsys, tmp_path):
    out_file = tmp_path / "v.csv"
    code, out, _ = run(capsys, "verify", "--suite", "spectral", "--out", str(out_file))
    assert code == 0
    assert out == ""
    rows = list(csv.DictReader(out_file.open()))
    assert rows and all(r["status"] == "pass" for r in rows)


def test_verify_reports_skip(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "cycles")
    rows = list(csv.DictReader(io.StringIO(out)))
    skipped = [r for r in rows if r["status"] == "skip"]
    assert code == 0
    assert skipped and all(r["note"] for r in skipped)


def test_config_hash_changes(capsys):
    _, a, _ = run(capsys, "experiment", "escape-rose", "--tmax", "0.5")
    _, b, _ = run(capsys, "experiment", "escape-rose", "--tmax", "0.6")
    ha = a.splitlines()[1].rsplit(",", 1)[1]
    hb = b.splitlines()[1].rsplit(",", 1)[1]
    assert ha != hb
