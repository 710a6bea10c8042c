"""Secondary acceptance: figures from CSVs produced by the dynbv CLI.

The plots package consumes the primary component only through its command
line and file schemas, so these tests invoke `dynbv` as a subprocess.
"""

import csv
import subprocess
import sys

import pytest
from PIL import Image

from dynbv_plots.cli import main as plots_main

CONFIG = """
[grid]
cell = EA mu=2 c=1.0
cell = GA mu=2 c=1.0

[run]
n = 60
runs = 4
seed = 5
"""


def _dynbv(*args) -> None:
    subprocess.run([sys.executable, "-m", "dynbv.cli", *args], check=True)


@pytest.fixture(scope="module")
def csv_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("csvs")
    config = out / "exp.cfg"
    config.write_text(CONFIG, encoding="utf-8")
    _dynbv("runtimes", "--config", str(config), "--out", str(out), "--workers", "1")
    _dynbv(
        "drift-analytic", "--algorithm", "ga", "--n", "3000", "--y", "1",
        "--c-grid", "2.0:4.0:0.1", "--out", str(out),
    )
    _dynbv(
        "drift-mc", "--config", str(config), "--out", str(out),
        "--y-grid", "1,5,20", "--samples", "400", "--workers", "1",
    )
    return out


def _verify_image(path):
    assert path.exists()
    with Image.open(path) as image:
        image.verify()


def test_fixed_target_figure_from_real_csvs(csv_dir, tmp_path):
    out = tmp_path / "fixed_target.png"
    code = plots_main(
        [
            "fixed_target",
            "--in",
            f"{csv_dir / 'experiment_fixed_target.csv'},{csv_dir / 'experiment_runs.csv'}",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    _verify_image(out)
    # The log time axis is part of the figure contract.
    svg = out.with_suffix(".svg").read_text(encoding="utf-8")
    assert "generations (log scale)" in svg


def test_drift_figure_with_band(csv_dir, tmp_path):
    out = tmp_path / "drift.png"
    code = plots_main(
        ["drift_profile", "--in", str(csv_dir / "drift_EA_mu2_c1.csv"), "--out", str(out)]
    )
    assert code == 0
    _verify_image(out)


def test_analytic_vs_mc_overlay_crossing(csv_dir, tmp_path):
    analytic = csv_dir / "analytic_ga.csv"
    out = tmp_path / "overlay.png"
    code = plots_main(
        [
            "analytic_vs_mc",
            "--in",
            f"{analytic},{csv_dir / 'drift_GA_mu2_c1.csv'}",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    _verify_image(out)
    # The plotted analytic curve must cross zero inside [3.0, 3.2].
    with open(analytic, newline="", encoding="utf-8") as fh:
        rows = sorted(csv.DictReader(fh), key=lambda r: float(r["c"]))
    crossing = None
    for left, right in zip(rows, rows[1:]):
        if float(left["drift"]) > 0 >= float(right["drift"]):
            crossing = (float(left["c"]), float(right["c"]))
    assert crossing is not None
    assert 3.0 <= crossing[0] and crossing[1] <= 3.2


def test_missing_column_reports_file(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n", encoding="utf-8")
    code = plots_main(["drift_profile", "--in", str(bad), "--out", str(tmp_path / "x.png")])
    assert code == 1
    assert "bad.csv" in capsys.readouterr().err
