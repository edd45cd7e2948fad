"""CLI transcripts diffed byte for byte against tests/golden/.

Set NOVELTY_ORACLE_REGEN_GOLDEN=1 to rewrite the golden files.
"""
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from novelty_oracle.cli import main

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
OBS = str(HERE / "data" / "obs.txt")

# name -> (argv, exit code)
CASES = {
    "predict_demorgan": (["predict", "--rule", "demorgan", "--partition", "{1}{2,3}"], 0),
    "check_kuipers_exchangeability": (
        ["check", "--rule", "kuipers:lambda=2,delta=2", "--property", "exchangeability", "--Tmax", "3"], 3),
    "eppf_ewens": (["eppf", "--rule", "ewens:theta=1", "--partition", "1,1,1"], 0),
    "check_kuipers_reverse_json": (
        ["check", "--rule", "kuipers:lambda=3,delta=2", "--property", "reverse-bayes", "--Tmax", "4",
         "--format", "json"], 3),
    "check_demorgan_extended": (
        ["check", "--rule", "demorgan", "--property", "extended-bayes", "--Tmax", "5"], 0),
    "measure_kuipers_csv": (["measure", "--rule", "kuipers:lambda=2,delta=2", "-T", "3", "--format", "csv"], 0),
    "enumerate_blocks": (["enumerate", "-T", "4", "--style", "blocks"], 0),
    "simulate_csv": (["simulate", "--rule", "demorgan", "-T", "3", "--reps", "1000", "--seed", "1",
                      "--format", "csv"], 0),
    "elicit_two_param": (["elicit", "--protocol", "two-param", "--z", "0.5", "--k", "0.125"], 0),
    "bets_demorgan": (["bets", "--rule", "demorgan", "--partition", "{1}{2,3}"], 0),
    "lattice_rb": (["lattice", "--rule", "two-param:alpha=0.5,theta=1", "--draws", "r,b"], 0),
    "lattice_rb_graph": (["lattice", "--rule", "two-param:alpha=0.5,theta=1", "--draws", "r,b",
                          "--format", "graph"], 0),
}


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    argv, expected_code = CASES[name]
    code, text = run(argv)
    path = GOLDEN / f"{name}.out"
    if os.environ.get("NOVELTY_ORACLE_REGEN_GOLDEN"):
        path.write_text(text)
    assert code == expected_code
    assert text == path.read_text()
    assert run(argv) == (code, text)  # byte-identical reruns


def test_spec_examples_content():
    _, text = run(CASES["predict_demorgan"][0])
    assert "object 1   0.25\nobject 2   0.5\nnovelty    0.25\n" in text
    _, text = run(CASES["eppf_ewens"][0])
    assert text == "0.333333333333\n"
    _, text = run(CASES["check_kuipers_exchangeability"][0])
    assert "0.166666666667 vs 0.0833333333333" in text


def test_fit_table():
    code, text = run(["fit", "--family", "ewens", "--data", OBS])
    assert code == 0 and "family          ewens" in text and "converged       true" in text


JSON_CASES = [
    ["predict", "--rule", "demorgan", "--partition", "1,2"],
    ["eppf", "--rule", "demorgan", "--partition", "1,2"],
    ["measure", "--rule", "demorgan", "-T", "3"],
    ["enumerate", "-T", "3"],
    ["check", "--rule", "demorgan", "--property", "plain-bayes", "--Tmax", "4"],
    ["simulate", "--rule", "demorgan", "-T", "3", "--reps", "50", "--seed", "9"],
    ["elicit", "--protocol", "ewens", "--z", "0.5"],
    ["bets", "--rule", "demorgan", "--partition", "1,2"],
    ["fit", "--family", "two-param", "--data", OBS],
    ["lattice", "--rule", "demorgan", "--draws", "r,b"],
]


@pytest.mark.parametrize("argv", JSON_CASES, ids=lambda a: a[0])
def test_json_schema(argv):
    code, text = run(argv + ["--format", "json"])
    assert code == 0
    doc = json.loads(text)
    assert doc["schema_version"] == 1 and doc["command"] == argv[0]


@pytest.mark.parametrize("argv", [
    [],
    ["predict", "--rule", "pitman", "--partition", "1"],
    ["predict", "--rule", "demorgan", "--partition", "2,1"],
    ["predict", "--rule", "two-param:alpha=1.5,theta=1", "--partition", "1"],
    ["simulate", "--rule", "demorgan", "-T", "3", "--reps", "10"],
    ["measure", "--rule", "demorgan", "-T", "0"],
    ["measure", "--rule", "demorgan", "-T", "13"],
    ["check", "--rule", "demorgan", "--property", "nonsense", "--Tmax", "3"],
    ["elicit", "--protocol", "two-param", "--z", "0.5"],
    ["elicit", "--protocol", "two-param", "--z", "0.5", "--k", "0.25"],
    ["fit", "--family", "ewens", "--data", "/nonexistent/file"],
    ["bets", "--rule", "kuipers:lambda=2,delta=2", "--partition", "1,2"],
], ids=lambda a: " ".join(a)[:40] or "empty")
def test_usage_errors_exit_2(argv, capsys):
    code, text = run(argv)
    assert code == 2 and text == ""
    assert capsys.readouterr().err


def test_cap_env_override(monkeypatch):
    monkeypatch.setenv("NOVELTY_ORACLE_MAX_T", "3")
    assert run(["measure", "--rule", "demorgan", "-T", "4"])[0] == 2
    monkeypatch.setenv("NOVELTY_ORACLE_MAX_T", "4")
    assert run(["measure", "--rule", "demorgan", "-T", "4"])[0] == 0


def test_elicit_range_warning_goes_to_stderr(capsys):
    code, text = run(["elicit", "--protocol", "two-param", "--z", "0.2", "--k", "0.3"])
    assert code == 0 and "warning" in capsys.readouterr().err


def test_internal_error_exit_1(monkeypatch):
    import novelty_oracle.cli as cli

    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "partition_probability", boom)
    assert run(["eppf", "--rule", "demorgan", "--partition", "1"])[0] == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "novelty_oracle", "eppf", "--rule", "ewens:theta=1",
                          "--partition", "1,1,1"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "0.333333333333\n"


def test_measure_csv_parses():
    import csv

    _, text = run(["measure", "--rule", "demorgan", "-T", "3", "--format", "csv"])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["blocks"] for r in rows][:2] == ["{1,2,3}", "{1,2}{3}"]
    assert sum(float(r["prob"]) for r in rows) == pytest.approx(1)
