"""Experiment orchestration: seeded run batches, runtime aggregation, CSV output.

Runs are embarrassingly parallel. Every run's stream is derived by hashing
(master seed, cell label, run index), so results are bit-identical regardless
of worker count or scheduling order.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .bitcore import RandomSource, entropy_word
from .environments import EnvironmentSpec
from .evolve import AlgorithmConfig, RunRecord, run

__all__ = [
    "RunRecord",
    "RuntimeSummary",
    "CellResult",
    "ExperimentResult",
    "generation_limit",
    "summarize",
    "run_experiment",
    "emit_csv",
    "load_runs_csv",
    "validate_onemax",
    "default_workers",
]

_MAX_COUNT = 2**63 - 1  # counters are 64-bit on the wire

DEFAULT_RUNS = 30
DEFAULT_CAP_MULTIPLIER = 100.0


@dataclass(frozen=True)
class RuntimeSummary:
    """Mean runtime over successful runs (lower bound) and ERT (upper bound)."""

    mean_successful: float | None
    ert: float
    success_rate: float
    run_count: int


@dataclass
class CellResult:
    algorithm: AlgorithmConfig
    cap: int
    records: list[RunRecord]
    summary: RuntimeSummary


@dataclass
class ExperimentResult:
    environment: EnvironmentSpec
    n: int
    master_seed: int
    cells: list[CellResult]


def generation_limit(c: float, n: float, multiplier: float = DEFAULT_CAP_MULTIPLIER) -> int:
    """Generation cap floor(multiplier * e^c / c * n * ln n)."""
    if c <= 0:
        raise ValueError("mutation parameter must be positive")
    if n < 2:
        raise ValueError("dimension must be >= 2")
    cap = math.floor(multiplier * math.exp(c) / c * n * math.log(n))
    if cap > _MAX_COUNT:
        raise OverflowError(
            f"generation cap {cap:.3e} exceeds the 64-bit counter range; "
            "lower c or the cap multiplier"
        )
    return cap


def summarize(records: list[RunRecord], cap: int) -> RuntimeSummary:
    """Aggregate runs: mean over successes, ERT = total generations / successes.

    The closed form equals the expectation of drawing runs from the pool until
    a success is drawn; capped runs contribute their cap value.
    """
    if not records:
        raise ValueError("summarize needs at least one run")
    successes = [r.generations for r in records if r.success]
    total = sum(r.generations for r in records)
    if successes:
        mean = sum(successes) / len(successes)
        ert = total / len(successes)
    else:
        mean = None
        ert = math.inf
    return RuntimeSummary(mean, ert, len(successes) / len(records), len(records))


def derive_run_seed(master_seed: int, cell_label: str, run_index: int) -> int:
    """Stable 64-bit seed for one run, independent of execution order."""
    return entropy_word(f"{master_seed}|{cell_label}|{run_index}")


def _cell_label(algorithm: AlgorithmConfig, env: EnvironmentSpec, n: int) -> str:
    return (
        f"{algorithm.variant}|mu={algorithm.mu}|c={algorithm.c!r}"
        f"|xp={algorithm.effective_crossover_probability!r}|{env.label()}|n={n}"
    )


def _execute_run(task) -> tuple[int, int, RunRecord]:
    cell_index, run_index, algorithm, env, n, cap, seed = task
    record = run(algorithm, env, n, cap, RandomSource(seed), seed=seed)
    return cell_index, run_index, record


def run_experiment(
    environment: EnvironmentSpec,
    algorithms: list[AlgorithmConfig],
    n: int,
    runs: int = DEFAULT_RUNS,
    master_seed: int = 1,
    cap_multiplier: float = DEFAULT_CAP_MULTIPLIER,
    workers: int = 1,
) -> ExperimentResult:
    """Execute every (algorithm, run index) cell with derived seeds."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if n < 2:
        raise ValueError("dimension must be >= 2")
    tasks = []
    caps = []
    for cell_index, algorithm in enumerate(algorithms):
        cap = generation_limit(algorithm.c, n, cap_multiplier)
        caps.append(cap)
        label = _cell_label(algorithm, environment, n)
        for run_index in range(runs):
            seed = derive_run_seed(master_seed, label, run_index)
            tasks.append((cell_index, run_index, algorithm, environment, n, cap, seed))

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_execute_run, tasks, chunksize=1))
    else:
        outcomes = [_execute_run(t) for t in tasks]
    outcomes.sort(key=lambda item: (item[0], item[1]))

    cells = []
    for cell_index, algorithm in enumerate(algorithms):
        records = [rec for ci, _, rec in outcomes if ci == cell_index]
        cells.append(
            CellResult(algorithm, caps[cell_index], records, summarize(records, caps[cell_index]))
        )
    return ExperimentResult(environment, n, master_seed, cells)


def _format_float(value: float | None) -> str:
    if value is None:
        return "NA"
    if math.isinf(value):
        return "inf"
    return repr(float(value))


def emit_csv(result: ExperimentResult, path_prefix: str | Path) -> list[Path]:
    """Write runs, fixed-target, and summary CSVs under the given path prefix."""
    if not result.cells:
        raise ValueError("emit_csv needs a nonempty result table")
    prefix = Path(path_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    env_label = result.environment.label()
    n = result.n

    runs_path = prefix.with_name(prefix.name + "_runs.csv")
    with open(runs_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["algorithm", "mu", "c", "n", "environment", "seed", "run_index", "generations", "success"]
        )
        for cell in result.cells:
            a = cell.algorithm
            for idx, rec in enumerate(cell.records):
                writer.writerow(
                    [a.variant, a.mu, repr(a.c), n, env_label, rec.seed, idx, rec.generations, int(rec.success)]
                )

    targets_path = prefix.with_name(prefix.name + "_fixed_target.csv")
    with open(targets_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "mu", "c", "n", "run_index", "ones_level", "first_hit_generation"])
        for cell in result.cells:
            a = cell.algorithm
            for idx, rec in enumerate(cell.records):
                for level in sorted(rec.first_hit):
                    writer.writerow([a.variant, a.mu, repr(a.c), n, idx, level, rec.first_hit[level]])

    summary_path = prefix.with_name(prefix.name + "_summary.csv")
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["algorithm", "mu", "c", "n", "mean_successful", "ert", "success_rate", "run_count", "cap"]
        )
        for cell in result.cells:
            a = cell.algorithm
            s = cell.summary
            writer.writerow(
                [
                    a.variant,
                    a.mu,
                    repr(a.c),
                    n,
                    _format_float(s.mean_successful),
                    _format_float(s.ert),
                    repr(s.success_rate),
                    s.run_count,
                    cell.cap,
                ]
            )

    return [runs_path, targets_path, summary_path]


def load_runs_csv(path: str | Path) -> list[dict]:
    """Rows of a runs CSV with numeric fields parsed."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            row["mu"] = int(row["mu"])
            row["c"] = float(row["c"])
            row["generations"] = int(row["generations"])
            row["success"] = bool(int(row["success"]))
            rows.append(row)
    return rows


def validate_onemax(
    n: int,
    runs: int = 200,
    c: float = 1.0,
    master_seed: int = 1,
    workers: int = 1,
) -> RuntimeSummary:
    """(1+1)-EA on static OneMax, for comparison against e * n * ln n."""
    if n < 100:
        raise ValueError("validation is meaningful only for n >= 100")
    result = run_experiment(
        EnvironmentSpec(kind="OneMax"),
        [AlgorithmConfig(mu=1, c=c, variant="EA")],
        n=n,
        runs=runs,
        master_seed=master_seed,
        workers=workers,
    )
    return result.cells[0].summary


def default_workers() -> int:
    return os.cpu_count() or 1
