"""Command-line entry point.

Subcommands, one per experiment artifact:

    runtimes        run the configured algorithm grid, emit runs/fixed-target/summary CSVs
    drift-mc        Monte-Carlo drift profiles over a y grid for every configured algorithm
    drift-analytic  near-optimum drift formula sweep over c or y for the (2+1)-EA / (2+1)-GA
    threshold       bisection root of the analytic drift sign in c
    compare         rank-sum comparison and largest significant factor between two cells
    validate-onemax (1+1)-EA against the known OneMax runtime

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import drift, harness, stats
from .config import ConfigError, ExperimentConfig, parse_config
from .drift import AnalyticDriftParams

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _load_config(path: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_config(text)


def _parse_grid(spec: str, value_type=float) -> list:
    """Grid syntax: either comma-separated values or lo:hi:step."""
    if ":" in spec:
        lo_s, hi_s, step_s = spec.split(":")
        lo, hi, step = float(lo_s), float(hi_s), float(step_s)
        if step <= 0:
            raise ConfigError("grid step must be positive")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [value_type(lo + i * step) for i in range(count)]
    return [value_type(tok.strip()) for tok in spec.split(",") if tok.strip()]


def _parse_cell_key(spec: str) -> tuple[str, int, float]:
    parts = spec.split(",")
    if len(parts) != 3:
        raise ConfigError(f"cell selector must be VARIANT,mu,c (got {spec!r})")
    return parts[0].strip(), int(parts[1]), float(parts[2])


def _out_dir(args, config: ExperimentConfig | None) -> Path:
    if args.out is not None:
        return Path(args.out)
    if config is not None:
        return config.output_dir
    return Path("results")


def _cmd_runtimes(args) -> int:
    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else config.seed
    result = harness.run_experiment(
        config.environment,
        config.algorithms,
        n=config.n,
        runs=config.runs,
        master_seed=seed,
        cap_multiplier=config.cap_multiplier,
        workers=args.workers,
    )
    out = _out_dir(args, config)
    paths = harness.emit_csv(result, out / args.prefix)
    for cell in result.cells:
        s = cell.summary
        mean = "NA" if s.mean_successful is None else f"{s.mean_successful:.1f}"
        ert = "inf" if math.isinf(s.ert) else f"{s.ert:.1f}"
        print(
            f"{cell.algorithm.name()}: mean={mean} ert={ert} "
            f"success_rate={s.success_rate:.2f} cap={cell.cap}"
        )
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_drift_mc(args) -> int:
    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else config.seed
    y_grid = _parse_grid(args.y_grid, int)
    out = _out_dir(args, config)
    for algorithm in config.algorithms:
        estimates = drift.drift_profile(
            algorithm,
            config.environment,
            n=config.n,
            y_grid=y_grid,
            samples=args.samples,
            per_sample_cap=args.cap,
            master_seed=seed,
            workers=args.workers,
        )
        name = f"drift_{algorithm.variant}_mu{algorithm.mu}_c{algorithm.c:g}.csv"
        path = drift.write_drift_csv(estimates, algorithm, config.n, out / name)
        print(f"wrote {path}")
        for est in estimates:
            print(
                f"  y={est.y}: mean={est.mean:+.4f} std_err={est.std_err:.4f} "
                f"samples={est.samples} timeouts={est.timeouts}"
            )
    return EXIT_OK


def _cmd_drift_analytic(args) -> int:
    if (args.c_grid is None) == (args.y_grid is None):
        raise ConfigError("provide exactly one of --c-grid or --y-grid")
    evaluator = drift.ea_drift_near_optimum if args.algorithm == "ea" else drift.ga_drift_near_optimum
    rows = []
    if args.c_grid is not None:
        for c in _parse_grid(args.c_grid, float):
            params = AnalyticDriftParams(c=c, n=args.n, y=args.y, r_max=args.r_max)
            rows.append((args.algorithm, params, evaluator(params)))
    else:
        for y in _parse_grid(args.y_grid, int):
            params = AnalyticDriftParams(c=args.c, n=args.n, y=y, r_max=args.r_max)
            rows.append((args.algorithm, params, evaluator(params)))
    out = _out_dir(args, None)
    path = drift.write_analytic_csv(rows, out / f"analytic_{args.algorithm}.csv")
    print(f"wrote {path}")
    for _, params, value in rows:
        print(f"  c={params.c:g} y={params.y}: drift={value:+.6f}")
    return EXIT_OK


def _cmd_threshold(args) -> int:
    lo_s, hi_s = args.bracket.split(",")
    c_star = drift.drift_sign_threshold(
        args.algorithm,
        n=args.n,
        y=args.y,
        c_lo=float(lo_s),
        c_hi=float(hi_s),
        tolerance=args.tol,
    )
    print(f"drift sign threshold ({args.algorithm}, n={args.n}, y={args.y}): c* = {c_star:.4f}")
    return EXIT_OK


def _select_sample(rows: list[dict], key: tuple[str, int, float]) -> stats.RuntimeSample:
    variant, mu, c = key
    matched = [r for r in rows if r["algorithm"] == variant and r["mu"] == mu and r["c"] == c]
    if not matched:
        raise ConfigError(f"no rows for cell {variant},{mu},{c:g} in the runs file")
    return stats.RuntimeSample(
        tuple(float(r["generations"]) for r in matched),
        tuple(not r["success"] for r in matched),
    )


def _cmd_compare(args) -> int:
    rows = harness.load_runs_csv(args.runs)
    fast_key = _parse_cell_key(args.fast)
    slow_key = _parse_cell_key(args.slow)
    fast = _select_sample(rows, fast_key)
    slow = _select_sample(rows, slow_key)
    result = stats.max_significant_factor(
        fast, slow, alpha=args.alpha, tolerance=args.tolerance, censored_mode=args.censored_mode
    )
    fast_label = "{},{},{:g}".format(*fast_key)
    slow_label = "{},{},{:g}".format(*slow_key)
    out = _out_dir(args, None)
    path = stats.write_comparison_csv(
        [(fast_label, slow_label, "a_less", result)], out / "comparison.csv"
    )
    if result.significant:
        print(
            f"{fast_label} is significantly faster than {slow_label} for every "
            f"d <= {result.d_max:.2f} (p={result.p_at_d_max:.3g} at d_max, alpha={result.alpha})"
        )
    else:
        print(
            f"not significant at d = 1 (p={result.p_at_one:.3g} > alpha={result.alpha}); "
            "no factor reported"
        )
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_validate_onemax(args) -> int:
    summary = harness.validate_onemax(
        n=args.n, runs=args.runs, c=args.c, master_seed=args.seed, workers=args.workers
    )
    predicted = math.e * args.n * math.log(args.n)
    ratio = summary.mean_successful / predicted if summary.mean_successful else float("nan")
    print(
        f"(1+1)-EA on OneMax, n={args.n}, {args.runs} runs: "
        f"mean={summary.mean_successful:.1f} predicted=e*n*ln(n)={predicted:.1f} "
        f"ratio={ratio:.4f} success_rate={summary.success_rate:.3f}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynbv",
        description="Runtime and drift experiments for (mu+1) algorithms on Dynamic BinVal",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        if config_required:
            p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
        p.add_argument(
            "--workers", type=int, default=harness.default_workers(), help="worker processes"
        )
        p.add_argument("--out", default=None, help="output directory")

    p = sub.add_parser("runtimes", help="run the algorithm grid and emit CSVs")
    add_common(p)
    p.add_argument("--prefix", default="experiment", help="output file name prefix")
    p.set_defaults(fn=_cmd_runtimes)

    p = sub.add_parser("drift-mc", help="Monte-Carlo drift profile over a y grid")
    add_common(p)
    p.add_argument("--y-grid", required=True, help="comma list or lo:hi:step")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--cap", type=int, default=drift.DEFAULT_SAMPLE_CAP, help="per-sample generation cap")
    p.set_defaults(fn=_cmd_drift_mc)

    p = sub.add_parser("drift-analytic", help="near-optimum analytic drift sweep")
    p.add_argument("--algorithm", choices=("ea", "ga"), required=True)
    p.add_argument("--n", type=int, default=3000)
    p.add_argument("--y", type=int, default=1)
    p.add_argument("--c", type=float, default=2.0, help="fixed c for a --y-grid sweep")
    p.add_argument("--c-grid", default=None, help="comma list or lo:hi:step")
    p.add_argument("--y-grid", default=None, help="comma list or lo:hi:step")
    p.add_argument("--r-max", type=int, default=drift.DEFAULT_R_MAX)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_drift_analytic)

    p = sub.add_parser("threshold", help="bisection root of the analytic drift in c")
    p.add_argument("--algorithm", choices=("ea", "ga"), required=True)
    p.add_argument("--n", type=int, default=3000)
    p.add_argument("--y", type=int, default=1)
    p.add_argument("--bracket", default="1.5,5.0", help="c_lo,c_hi with a sign change")
    p.add_argument("--tol", type=float, default=0.01)
    p.set_defaults(fn=_cmd_threshold)

    p = sub.add_parser("compare", help="rank-sum comparison of two cells from a runs CSV")
    p.add_argument("--runs", required=True, help="runs CSV from the runtimes subcommand")
    p.add_argument("--fast", required=True, help="cell selector VARIANT,mu,c")
    p.add_argument("--slow", required=True, help="cell selector VARIANT,mu,c")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.add_argument("--censored-mode", choices=("cap", "drop"), default="cap")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("validate-onemax", help="(1+1)-EA against e*n*ln(n) on OneMax")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--runs", type=int, default=200)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=harness.default_workers())
    p.set_defaults(fn=_cmd_validate_onemax)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, OverflowError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
