import csv
import dataclasses
import io
import json
import subprocess
import sys

import pytest

from quadsigma import cli
from quadsigma.localsym import SigmaSet, is_squarefree
from quadsigma.norm1kit import CSV_FIELDS, verify_field


def run_main(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_single_field_passes(capsys):
    code, out, err = run_main(["--d", "-14", "--sigma", "minimal"], capsys)
    assert code == 0
    assert "{inf,2,7}" in out and "++++++" in out
    assert "1 pairs checked, 1 passed, 0 failed" in err


@pytest.mark.parametrize("argv", [
    ["--d", "4"],
    ["--d", "1"],
    ["--d", "503"],
    ["--d", "-14", "--sigma", "explicit", "2"],
    ["--d", "-14", "--sigma", "minimal_plus", "2,101"],
    ["--d", "-14", "--sigma", "bogus"],
    ["--d", "x"],
    ["--d-range", "5"],
    ["--d", "-14", "--jobs", "0"],
    [],
])
def test_usage_errors(argv, capsys):
    code, out, err = run_main(argv, capsys)
    assert code == 2
    assert out == ""
    assert "error" in err


def test_identity_failure_exit_code(monkeypatch, capsys):
    def broken(pair):
        return dataclasses.replace(verify_field(*pair), pass_n4=False)

    monkeypatch.setattr(cli, "_verify", broken)
    code, out, err = run_main(["--d", "-14,-5", "--format", "json"], capsys)
    assert code == 1
    assert "2 failed" in err
    assert all(json.loads(line)["pass_n4"] is False for line in out.splitlines())


def test_fail_fast_stops_early(monkeypatch, capsys):
    monkeypatch.setattr(cli, "_verify", lambda pair: dataclasses.replace(verify_field(*pair), pass_n1=False))
    code, out, err = run_main(["--d", "-14,-5,-6", "--format", "json", "--fail-fast"], capsys)
    assert code == 1
    assert len(out.splitlines()) == 1


def test_json_lines(capsys):
    code, out, _ = run_main(["--d", "-5", "--d", "2,3", "--format", "json"], capsys)
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["d"] for r in rows] == [-5, 2, 3]
    assert all(list(r) == list(CSV_FIELDS) for r in rows)


def test_csv_columns_and_sorting(capsys):
    code, out, _ = run_main(["--d", "7,-14,2", "--format", "csv", "--sigma", "minimal_plus", "3"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == list(CSV_FIELDS)
    assert [r[0] for r in rows[1:]] == ["-14", "2", "7"]
    assert rows[1][1] == "{inf,2,3,7}"
    assert all(r[-1] == "" for r in rows[1:])


def test_timings_fill_ms_elapsed(capsys):
    _, out, _ = run_main(["--d", "-5", "--format", "csv", "--timings"], capsys)
    assert float(list(csv.reader(io.StringIO(out)))[1][-1]) >= 0


def test_full_range_minimal_plus(capsys):
    code, out, err = run_main(["--d-range", "-150..150", "--sigma", "minimal_plus", "2,3,5,7", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))[1:]
    expected = [d for d in range(-150, 151) if d not in (0, 1) and is_squarefree(d)]
    assert [int(r[0]) for r in rows] == expected
    assert f"{len(expected)} pairs checked, {len(expected)} passed, 0 failed" in err


def test_parallel_output_is_identical(capsys):
    argv = ["--d-range", "-60..60", "--format", "csv"]
    code1, serial, _ = run_main(argv + ["--jobs", "1"], capsys)
    code2, parallel, _ = run_main(argv + ["--jobs", "3"], capsys)
    assert code1 == code2 == 0
    assert serial == parallel


@pytest.mark.parametrize("d,needles", [
    (-5, ["(1,0,5)", "(2,2,3)", "-1", "2", "√-5", "Z/2"]),
    (-23, ["class group C_K = Z/3"]),
    (2, ["fundamental unit 1+√2, norm -1"]),
])
def test_explain(d, needles, capsys):
    code, out, _ = run_main(["--d", str(d), "--explain"], capsys)
    assert code == 0
    for n in needles:
        assert n in out


def test_run_config_sigma_policies():
    cfg = cli.RunConfig(d_values=(-5,), sigma_policy="minimal_plus", sigma_primes=(3,))
    assert cfg.sigma_for(-5) == SigmaSet.of([2, 3, 5])
    cfg = cli.RunConfig(d_values=(-5,), sigma_policy="explicit", sigma_primes=(2, 5, 11))
    assert cfg.pairs() == [(-5, SigmaSet.of([2, 5, 11]))]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quadsigma", "--d", "4"], capture_output=True, text=True)
    assert proc.returncode == 2
    proc = subprocess.run([sys.executable, "-m", "quadsigma", "--d", "-14", "--format", "json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["order_c_sigma"] == 2
