import json
import subprocess
import sys

import pytest


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "iwacalc.cli", *args],
                          capture_output=True, text=True)


def test_chartable(tmp_path):
    out = tmp_path / "ct.json"
    r = run_cli("chartable", "--group", "catalog:heisenberg27",
                "--out", str(out))
    assert r.returncode == 0
    data = json.loads(out.read_text())
    assert len(data["classes"]) == 11
    assert sorted(data["degrees"]) == [1] * 9 + [3, 3]


def test_chartable_m27(tmp_path):
    out = tmp_path / "ct.json"
    r = run_cli("chartable", "--group", "catalog:m27", "--out", str(out))
    assert r.returncode == 0
    data = json.loads(out.read_text())
    assert sorted(data["degrees"]) == [1] * 9 + [3, 3]
    assert data["cyclo_level"] == 2


def test_chartable_bad_group():
    r = run_cli("chartable", "--group", "catalog:c6")
    assert r.returncode == 2


def test_bad_group_file(tmp_path):
    bad = tmp_path / "bad.grp"
    bad.write_text("3 1\ntable\n0 1 2\n1 2 0\n2 1 0\n")
    r = run_cli("chartable", "--group", str(bad))
    assert r.returncode == 2
    assert "input error" in r.stderr


def test_check_suite_and_determinism(tmp_path):
    o1, o2 = tmp_path / "a.json", tmp_path / "b.json"
    r1 = run_cli("check", "wall", "--l", "3", "--count", "3",
                 "--seed", "5", "--out", str(o1))
    r2 = run_cli("check", "wall", "--l", "3", "--count", "3",
                 "--seed", "5", "--out", str(o2))
    assert r1.returncode == 0 and r2.returncode == 0
    assert o1.read_bytes() == o2.read_bytes()
    data = json.loads(o1.read_text())
    assert data["passed"] and data["config"]["seed"] == 5


def test_check_unknown_suite():
    r = run_cli("check", "nosuchsuite")
    assert r.returncode == 2


def test_sabotage_detection(tmp_path):
    out = tmp_path / "s.json"
    r = run_cli("check", "prop32", "--l", "3", "--count", "1",
                "--sabotage", "--out", str(out))
    assert r.returncode == 0  # detection of the sabotage is the pass
    data = json.loads(out.read_text())
    assert all(it["passed"] for it in data["items"])


def test_pseudomeasure_command(tmp_path):
    out = tmp_path / "lam.txt"
    r = run_cli("pseudomeasure", "--l", "5", "--precision", "6",
                "--degree", "8", "--conductor", "25", "--S", "inf,5",
                "--level", "6", "--out", str(out))
    assert r.returncode == 0
    text = out.read_text()
    assert text.startswith("l 5")
    assert "a[-1]" in text and "verification annex" in text


def test_pseudomeasure_rejects_bad_conductor():
    r = run_cli("pseudomeasure", "--l", "5", "--conductor", "24")
    assert r.returncode == 2
