import csv
import json
import subprocess
import sys

import pytest

from lagcap.cli import main
from lagcap.corpus import read_json


def run(*argv):
    return main([str(a) for a in argv])


@pytest.mark.parametrize("argv, code", [
    (["validate", "c1"], 0),
    (["validate", "d2"], 0),
    (["homology", "c1", "--window=-0.5,0.5"], 0),
    (["barcode", "c1"], 0),
    (["triangle", "c1", "--cuts=-0.5,0.5,1.5"], 0),
    (["map", "verify", "id-c1"], 0),
    (["map", "verify", "pss-phi", "--after", "pss-psi", "--window=-0.5,0.5"], 0),
    (["map", "verify", "pss-phi-corrupt", "--after", "pss-psi", "--window=-0.5,0.5"], 2),
    (["map", "verify", "pss-phi", "--after", "pss-psi"], 1),
    (["admissible", "radial-slow", "--grid", "9"], 0),
    (["admissible", "radial-fast", "--grid", "9"], 2),
    (["admissible", "custom-bump", "--grid", "5"], 0),
    (["capacity", "radial", "--radius", "1", "--fraction", "0.5", "--grid", "9"], 0),
    (["capacity", "radial", "--radius", "1", "--fraction", "1.5"], 1),
    (["scenario", "d1-d2"], 0),
    (["scenario", "negative-base"], 2),
    (["scenario", "negative-step"], 2),
    (["scenario", "nope"], 1),
    (["validate", "no-such-file.json"], 1),
    (["homology", "c1", "--window", "1"], 1),
    (["homology", "c1", "--window=0,1"], 1),
    (["bogus"], 1),
])
def test_exit_codes(argv, code, capsys):
    assert run(*argv) == code


def test_homology_output_and_csv(tmp_path, capsys):
    assert run("homology", "c1", "--window=-0.5,0.5", "--out", tmp_path) == 0
    rows = list(csv.reader(open(tmp_path / "homology.csv")))
    assert rows[0] == ["a", "b", "degree", "rank"]
    assert [r[2:] for r in rows[1:]] == [["0", "1"], ["1", "1"]]


def test_barcode_csv(tmp_path, capsys):
    assert run("barcode", "c1", "--out", tmp_path) == 0
    rows = list(csv.reader(open(tmp_path / "barcode.csv")))
    assert rows[0] == ["birth", "death", "degree"] and len(rows) > 1


def test_chord_scan_csv(tmp_path, capsys):
    assert run("chord-scan", "radial-fast", "--tmax", "0.6", "--grid", "9", "--out", tmp_path) == 0
    rows = list(csv.reader(open(tmp_path / "chords.csv")))
    assert rows[0] == ["x1", "y1", "T"]
    assert all(abs(float(r[2]) - 0.5) < 1e-6 for r in rows[1:]) and len(rows) > 1
    assert "T = 0.5000000000" in capsys.readouterr().out


def test_invalid_complex_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    obj, _ = read_json("c1")
    obj["generators"][0]["degree"] += 5
    bad.write_text(json.dumps(obj))
    assert run("validate", bad) == 2


def test_console_script_module():
    res = subprocess.run([sys.executable, "-m", "lagcap.cli", "validate", "c1"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout
