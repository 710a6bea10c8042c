"""Figure rendering from dynbv experiment CSVs.

Three figure kinds, one per experiment artifact:

* fixed_target     runtime curves: mean (and ERT, when runs were censored)
                   first-hit generation per ones-count level, log time axis
* drift_profile    Monte-Carlo drift over the zero-bit count, with a
                   +-std_dev shaded band
* analytic_vs_mc   near-optimum drift over c: analytic curve overlaid with
                   Monte-Carlo means and +-std_err error bars

Rendering only groups and averages columns that the CSVs already carry; all
statistics live in the producing package. Output is a lossless raster plus a
vector sibling, rendered deterministically.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "dynbv-plots"
import matplotlib.pyplot as plt

__all__ = ["FigureSpec", "SchemaError", "render"]

KINDS = ("fixed_target", "drift_profile", "analytic_vs_mc")

_PNG_METADATA = {"Software": "dynbv-plots"}


class SchemaError(ValueError):
    """An input CSV does not carry the columns the figure needs."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: figure kind, input CSVs, and the output image path."""

    kind: str
    inputs: tuple[Path, ...]
    output: Path
    title: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("a figure needs at least one input CSV")


def _read_rows(path: Path, required: tuple[str, ...]) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in required if col not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {', '.join(missing)}")
        return list(reader)


def _cell_label(row: dict) -> str:
    return f"({row['mu']}+1)-{row['algorithm']} c={float(row['c']):g}"


_SVG_METADATA = {"Date": None}  # drop the timestamp; rendering stays byte-stable


def _metadata_for(path: Path) -> dict | None:
    if path.suffix == ".png":
        return _PNG_METADATA
    if path.suffix == ".svg":
        return _SVG_METADATA
    return None


def _save(fig, output: Path) -> list[Path]:
    output.parent.mkdir(parents=True, exist_ok=True)
    written = [output]
    fig.savefig(output, dpi=150, metadata=_metadata_for(output))
    if output.suffix != ".svg":
        sibling = output.with_suffix(".svg")
        fig.savefig(sibling, metadata=_SVG_METADATA)
        written.append(sibling)
    plt.close(fig)
    return written


def _render_fixed_target(spec: FigureSpec):
    rows = _read_rows(
        spec.inputs[0],
        ("algorithm", "mu", "c", "n", "run_index", "ones_level", "first_hit_generation"),
    )
    # Optional runs CSV supplies censored runtimes so the ERT curve can be drawn.
    censored: dict[str, list[int]] = defaultdict(list)
    run_counts: dict[str, set[str]] = defaultdict(set)
    if len(spec.inputs) > 1:
        for row in _read_rows(
            spec.inputs[1],
            ("algorithm", "mu", "c", "run_index", "generations", "success"),
        ):
            label = _cell_label(row)
            run_counts[label].add(row["run_index"])
            if row["success"] in ("0", "False", "false"):
                censored[label].append(int(row["generations"]))

    by_cell: dict[str, dict[int, list[int]]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        by_cell[_cell_label(row)][int(row["ones_level"])].append(
            int(row["first_hit_generation"])
        )

    fig, ax = plt.subplots(figsize=(7, 4.4))
    for label in sorted(by_cell):
        levels = sorted(by_cell[label])
        means = [sum(by_cell[label][lv]) / len(by_cell[label][lv]) for lv in levels]
        (line,) = ax.plot(levels, means, label=label)
        lost = censored.get(label, [])
        if lost:
            # ERT: censored runs add their full budget on top of the reachers.
            extra = sum(lost)
            erts = [
                (sum(by_cell[label][lv]) + extra) / len(by_cell[label][lv])
                for lv in levels
            ]
            ax.plot(levels, erts, linestyle="--", color=line.get_color())
    ax.set_yscale("log")
    ax.set_xlabel("ones-count level")
    ax.set_ylabel("generations (log scale)")
    ax.set_title(spec.title or "Fixed-target runtimes (dashed: ERT)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def _render_drift_profile(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(7, 4.4))
    for path in spec.inputs:
        rows = _read_rows(
            path,
            ("algorithm", "mu", "c", "n", "y", "mean", "std_dev", "std_err", "samples", "timeouts"),
        )
        by_cell: dict[str, list[dict]] = defaultdict(list)
        for row in rows:
            by_cell[_cell_label(row)].append(row)
        for label in sorted(by_cell):
            cell_rows = sorted(by_cell[label], key=lambda r: int(r["y"]))
            ys = [int(r["y"]) for r in cell_rows]
            means = [float(r["mean"]) for r in cell_rows]
            bands = [float(r["std_dev"]) for r in cell_rows]
            (line,) = ax.plot(ys, means, marker="o", markersize=3, label=label)
            ax.fill_between(
                ys,
                [m - b for m, b in zip(means, bands)],
                [m + b for m, b in zip(means, bands)],
                alpha=0.2,
                color=line.get_color(),
            )
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("zero-bits y (distance to optimum)")
    ax.set_ylabel("degenerate population drift")
    ax.set_title(spec.title or "Degenerate population drift (band: std dev)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def _render_analytic_vs_mc(spec: FigureSpec):
    analytic_rows = _read_rows(spec.inputs[0], ("algorithm", "c", "n", "y", "drift", "r_max"))
    mc_rows: list[dict] = []
    for path in spec.inputs[1:]:
        mc_rows.extend(
            _read_rows(
                path,
                ("algorithm", "mu", "c", "n", "y", "mean", "std_dev", "std_err"),
            )
        )

    fig, ax = plt.subplots(figsize=(7, 4.4))
    by_algorithm: dict[str, list[dict]] = defaultdict(list)
    for row in analytic_rows:
        by_algorithm[row["algorithm"]].append(row)
    for algorithm in sorted(by_algorithm):
        rows = sorted(by_algorithm[algorithm], key=lambda r: float(r["c"]))
        ax.plot(
            [float(r["c"]) for r in rows],
            [float(r["drift"]) for r in rows],
            label=f"{algorithm} analytic",
        )
    by_cell: dict[str, list[dict]] = defaultdict(list)
    for row in mc_rows:
        by_cell[_cell_label(row)].append(row)
    for label in sorted(by_cell):
        rows = sorted(by_cell[label], key=lambda r: float(r["c"]))
        ax.errorbar(
            [float(r["c"]) for r in rows],
            [float(r["mean"]) for r in rows],
            yerr=[float(r["std_err"]) for r in rows],
            fmt="o",
            markersize=3.5,
            capsize=2,
            label=f"{label} Monte-Carlo",
        )
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("mutation parameter c")
    ax.set_ylabel("drift at the optimum")
    ax.set_title(spec.title or "Near-optimum drift: formula vs Monte-Carlo")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


_RENDERERS = {
    "fixed_target": _render_fixed_target,
    "drift_profile": _render_drift_profile,
    "analytic_vs_mc": _render_analytic_vs_mc,
}


def render(spec: FigureSpec) -> list[Path]:
    """Render one figure; returns the written files (raster plus vector)."""
    fig = _RENDERERS[spec.kind](spec)
    return _save(fig, spec.output)
