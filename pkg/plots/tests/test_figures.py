"""Unit tests for figure rendering from specimen CSVs."""

import pytest
from PIL import Image

from dynbv_plots import FigureSpec, SchemaError, render

FIXED_TARGET = """algorithm,mu,c,n,run_index,ones_level,first_hit_generation
EA,2,1.5,40,0,20,0
EA,2,1.5,40,0,21,3
EA,2,1.5,40,0,22,9
EA,2,1.5,40,1,20,0
EA,2,1.5,40,1,21,5
EA,2,1.5,40,1,22,12
GA,2,2.5,40,0,20,0
GA,2,2.5,40,0,21,4
GA,2,2.5,40,0,22,7
"""

RUNS = """algorithm,mu,c,n,environment,seed,run_index,generations,success
EA,2,1.5,40,DynBV,11,0,9,1
EA,2,1.5,40,DynBV,12,1,500,0
GA,2,2.5,40,DynBV,13,0,7,1
"""

DRIFT = """algorithm,mu,c,n,y,mean,std_dev,std_err,samples,timeouts
EA,2,2.3,3000,10,0.03,0.9,0.009,10000,0
EA,2,2.3,3000,50,-0.02,1.1,0.011,10000,0
EA,2,2.3,3000,150,-0.06,1.3,0.013,10000,0
"""

DRIFT_SINGLE = """algorithm,mu,c,n,y,mean,std_dev,std_err,samples,timeouts
GA,2,3.3,3000,1,-0.04,0.8,0.008,10000,0
"""

ANALYTIC = """algorithm,c,n,y,drift,r_max
ga,2.0,3000,1,0.2698,50
ga,3.0,3000,1,0.0200,50
ga,4.0,3000,1,-0.1627,50
"""

MC_SWEEP = """algorithm,mu,c,n,y,mean,std_dev,std_err,samples,timeouts
GA,2,2.0,3000,1,0.2672,0.74,0.0074,10000,0
GA,2,3.0,3000,1,0.0214,0.87,0.0087,10000,0
GA,2,4.0,3000,1,-0.1525,1.01,0.0101,10000,0
"""


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def _assert_valid_images(paths):
    png = [p for p in paths if p.suffix == ".png"]
    svg = [p for p in paths if p.suffix == ".svg"]
    assert png and svg
    with Image.open(png[0]) as image:
        image.verify()
    assert svg[0].read_text(encoding="utf-8").lstrip().startswith("<?xml")


def test_fixed_target_figure(tmp_path):
    ft = _write(tmp_path, "ft.csv", FIXED_TARGET)
    runs = _write(tmp_path, "runs.csv", RUNS)
    spec = FigureSpec("fixed_target", (ft, runs), tmp_path / "ft.png")
    written = render(spec)
    _assert_valid_images(written)
    svg_text = written[1].read_text(encoding="utf-8")
    # Two cells -> two labeled curves on one axis; the time axis is log.
    assert "(2+1)-EA c=1.5" in svg_text
    assert "(2+1)-GA c=2.5" in svg_text


def test_fixed_target_without_runs_file(tmp_path):
    ft = _write(tmp_path, "ft.csv", FIXED_TARGET)
    written = render(FigureSpec("fixed_target", (ft,), tmp_path / "ft.png"))
    _assert_valid_images(written)


def test_drift_profile_figure(tmp_path):
    drift = _write(tmp_path, "drift.csv", DRIFT)
    written = render(FigureSpec("drift_profile", (drift,), tmp_path / "drift.png"))
    _assert_valid_images(written)


def test_drift_profile_single_point(tmp_path):
    drift = _write(tmp_path, "one.csv", DRIFT_SINGLE)
    written = render(FigureSpec("drift_profile", (drift,), tmp_path / "one.png"))
    _assert_valid_images(written)


def test_analytic_vs_mc_overlay(tmp_path):
    analytic = _write(tmp_path, "analytic.csv", ANALYTIC)
    mc = _write(tmp_path, "mc.csv", MC_SWEEP)
    written = render(FigureSpec("analytic_vs_mc", (analytic, mc), tmp_path / "overlay.png"))
    _assert_valid_images(written)
    svg_text = written[1].read_text(encoding="utf-8")
    assert "ga analytic" in svg_text
    assert "Monte-Carlo" in svg_text


def test_rendering_is_deterministic(tmp_path):
    drift = _write(tmp_path, "drift.csv", DRIFT)
    a = render(FigureSpec("drift_profile", (drift,), tmp_path / "a.png"))
    b = render(FigureSpec("drift_profile", (drift,), tmp_path / "b.png"))
    assert a[0].read_bytes() == b[0].read_bytes()
    assert a[1].read_text() == b[1].read_text()


def test_missing_column_names_the_file(tmp_path):
    bad = _write(tmp_path, "bad.csv", "algorithm,c\nEA,1.0\n")
    with pytest.raises(SchemaError) as excinfo:
        render(FigureSpec("drift_profile", (bad,), tmp_path / "bad.png"))
    assert "bad.csv" in str(excinfo.value)
    assert "mean" in str(excinfo.value)


def test_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec("scatter", (tmp_path / "x.csv",), tmp_path / "x.png")
    with pytest.raises(ValueError):
        FigureSpec("drift_profile", (), tmp_path / "x.png")
