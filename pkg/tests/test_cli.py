"""End-to-end tests of the command-line interface."""

import csv

import pytest

from dynbv.cli import main

CONFIG = """
[environment]
kind = DynBV

[grid]
cell = EA mu=1 c=1.0
cell = GA mu=2 c=1.0

[run]
n = 40
runs = 4
seed = 11
"""


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(CONFIG, encoding="utf-8")
    return path


def test_runtimes_writes_csvs(config_path, tmp_path, capsys):
    out = tmp_path / "results"
    code = main(
        ["runtimes", "--config", str(config_path), "--out", str(out), "--workers", "1"]
    )
    assert code == 0
    runs_file = out / "experiment_runs.csv"
    assert runs_file.exists()
    with open(runs_file, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8
    assert {r["algorithm"] for r in rows} == {"EA", "GA"}
    captured = capsys.readouterr()
    assert "success_rate" in captured.out


def test_runtimes_byte_identical_reruns(config_path, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert main(["runtimes", "--config", str(config_path), "--out", str(out)]) == 0
    for name in ("experiment_runs.csv", "experiment_fixed_target.csv", "experiment_summary.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_compare_subcommand(config_path, tmp_path, capsys):
    out = tmp_path / "results"
    main(["runtimes", "--config", str(config_path), "--out", str(out), "--workers", "1"])
    code = main(
        [
            "compare",
            "--runs",
            str(out / "experiment_runs.csv"),
            "--fast",
            "EA,1,1.0",
            "--slow",
            "GA,2,1.0",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert (out / "comparison.csv").exists()
    header = (out / "comparison.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "cell_fast,cell_slow,alternative,alpha,d_max,p_at_d_max"


def test_drift_mc_subcommand(config_path, tmp_path):
    out = tmp_path / "drift"
    code = main(
        [
            "drift-mc",
            "--config",
            str(config_path),
            "--out",
            str(out),
            "--y-grid",
            "1,3",
            "--samples",
            "50",
            "--workers",
            "1",
        ]
    )
    assert code == 0
    path = out / "drift_EA_mu1_c1.csv"
    assert path.exists()
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["y"]) for r in rows] == [1, 3]
    assert all(int(r["samples"]) == 50 - int(r["timeouts"]) for r in rows)


def test_drift_analytic_subcommand(tmp_path):
    out = tmp_path / "analytic"
    code = main(
        [
            "drift-analytic",
            "--algorithm",
            "ga",
            "--n",
            "3000",
            "--y",
            "1",
            "--c-grid",
            "2.0:3.0:0.5",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    with open(out / "analytic_ga.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["c"]) for r in rows] == [2.0, 2.5, 3.0]
    assert all(float(r["drift"]) > 0 for r in rows)


def test_threshold_subcommand(capsys):
    code = main(
        ["threshold", "--algorithm", "ea", "--n", "3000", "--y", "1", "--bracket", "1.5,4.0"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "c* = 2.4" in out or "c* = 2.5" in out


def test_validate_onemax_subcommand(capsys):
    code = main(
        ["validate-onemax", "--n", "200", "--runs", "10", "--seed", "4", "--workers", "1"]
    )
    assert code == 0
    assert "ratio=" in capsys.readouterr().out


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[run]\nn = 10\n", encoding="utf-8")
    assert main(["runtimes", "--config", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["runtimes", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_runtime_error_exit_code(capsys):
    # A bracket without a sign change is a runtime failure, not a config one.
    code = main(
        ["threshold", "--algorithm", "ea", "--n", "3000", "--y", "1", "--bracket", "0.5,1.0"]
    )
    assert code == 3
    assert "no sign change" in capsys.readouterr().err
