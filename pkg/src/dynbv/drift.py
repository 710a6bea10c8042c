"""Degenerate-population drift: Monte-Carlo estimation and exact asymptotics.

A drift sample starts from a population of mu copies of a string with exactly
y zero-bits, steps the algorithm until (a) some offspring that is not a copy
of the starting string has been accepted and (b) the population is degenerate
again, and reports the decrease in zero-bits. Samples that exceed the
per-sample generation cap are discarded but counted.

The analytic evaluators implement the (2+1)-EA and (2+1)-GA state-machine
formulas for y << n: conditioned on a progress event, the expected gain is
the single-zero-flip mass plus the accepted flip-r terms weighted by the
continuation value of the resulting two-member state. The progress
probability is one minus the no-zero-flip mass minus the rejected
single-zero-flip mass; the GA continuation values solve a linear balance
equation per state, recursively in the gap size. Both evaluators are
validated against the Monte-Carlo estimator in the test suite.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .bitcore import RandomSource, uniform_with_zeros
from .environments import Environment, EnvironmentSpec
from .evolve import (
    _all_equal,
    _conditioned_escape_offspring,
    _create_offspring,
    _escape_rate,
    _select,
    AlgorithmConfig,
)

__all__ = [
    "DriftEstimate",
    "AnalyticDriftParams",
    "mc_drift_sample",
    "mc_drift",
    "drift_profile",
    "ea_state_value",
    "ea_drift_near_optimum",
    "ga_state_value",
    "ga_drift_near_optimum",
    "drift_sign_threshold",
    "write_drift_csv",
    "write_analytic_csv",
]

DEFAULT_SAMPLE_CAP = 10**6
DEFAULT_R_MAX = 50

_POISSON_TAIL = 1e-13


@dataclass(frozen=True)
class DriftEstimate:
    """Monte-Carlo estimate of E[X_i - X_{i+1} | X_i = y]."""

    y: int
    mean: float
    std_dev: float
    std_err: float
    samples: int
    timeouts: int


@dataclass(frozen=True)
class AnalyticDriftParams:
    """Inputs to the near-optimum drift formulas.

    r_max truncates the one-bit-flip count; s_max truncates the inner Poisson
    sums of the GA recursion (None = extend until the tail is below 1e-13).
    """

    c: float
    n: int
    y: int = 1
    r_max: int = DEFAULT_R_MAX
    s_max: int | None = None

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("mutation parameter must be positive")
        if self.r_max < 1:
            raise ValueError("r_max must be >= 1")
        if not 1 <= self.y <= self.n:
            raise ValueError("zero count y must lie in [1, n]")


def mc_drift_sample(
    config: AlgorithmConfig,
    env_spec: EnvironmentSpec,
    n: int,
    y: int,
    per_sample_cap: int,
    rng: RandomSource,
) -> int | None:
    """One drift sample; None when the generation cap was hit first.

    Degenerate stretches before the first progress event are fast-forwarded
    exactly as in the run loop (see evolve); the population there is still
    all copies of the starting string, so only mutations flipping a zero-bit
    can produce a progress event.
    """
    if not 1 <= y <= n:
        raise ValueError("zero count y must lie in [1, n]")
    start = uniform_with_zeros(n, y, rng)
    members = [start] * config.mu
    env = Environment(env_spec, n)
    progressed = False
    degenerate = True
    gen = 0
    while gen < per_sample_cap:
        if degenerate:
            if progressed:
                return y - members[0].zeros
            rate = _escape_rate(config, n, y)
            if rate <= 0.0:
                return None
            gen += rng.geometric(rate)
            if gen > per_sample_cap:
                return None
            offspring = _conditioned_escape_offspring(start, config, rng)
        else:
            gen += 1
            offspring, _ = _create_offspring(members, config, rng)
        round_ = env.sample_round(gen, rng)
        accepted = _select(members, offspring, round_, rng)
        if accepted and offspring.bits != start.bits:
            progressed = True
        degenerate = _all_equal(members)
    if degenerate and progressed:
        return y - members[0].zeros
    return None


def mc_drift(
    config: AlgorithmConfig,
    env_spec: EnvironmentSpec,
    n: int,
    y: int,
    samples: int,
    per_sample_cap: int = DEFAULT_SAMPLE_CAP,
    rng: RandomSource | None = None,
) -> DriftEstimate:
    """Aggregate mc_drift_sample; timeouts are counted, never averaged in."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if rng is None:
        rng = RandomSource(0)
    deltas = []
    timeouts = 0
    for _ in range(samples):
        delta = mc_drift_sample(config, env_spec, n, y, per_sample_cap, rng)
        if delta is None:
            timeouts += 1
        else:
            deltas.append(delta)
    return _estimate_from(y, deltas, timeouts)


def _estimate_from(y: int, deltas: list[int], timeouts: int) -> DriftEstimate:
    count = len(deltas)
    if count == 0:
        return DriftEstimate(y, math.nan, math.nan, math.nan, 0, timeouts)
    mean = sum(deltas) / count
    if count > 1:
        var = sum((d - mean) ** 2 for d in deltas) / (count - 1)
        std = math.sqrt(var)
    else:
        std = 0.0
    return DriftEstimate(y, mean, std, std / math.sqrt(count), count, timeouts)


def _profile_point(task) -> tuple[int, DriftEstimate]:
    index, config, env_spec, n, y, samples, cap, seed = task
    rng = RandomSource.from_entropy(seed, "drift-profile", index, y)
    return index, mc_drift(config, env_spec, n, y, samples, cap, rng)


def drift_profile(
    config: AlgorithmConfig,
    env_spec: EnvironmentSpec,
    n: int,
    y_grid: list[int],
    samples: int,
    per_sample_cap: int = DEFAULT_SAMPLE_CAP,
    master_seed: int = 1,
    workers: int = 1,
) -> list[DriftEstimate]:
    """One drift estimate per grid point, with per-point derived streams."""
    if not y_grid:
        raise ValueError("y grid must be nonempty")
    if any(not 1 <= y <= n for y in y_grid):
        raise ValueError("y grid values must lie in [1, n]")
    tasks = [
        (i, config, env_spec, n, y, samples, per_sample_cap, master_seed)
        for i, y in enumerate(y_grid)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_profile_point, tasks))
    else:
        done = [_profile_point(t) for t in tasks]
    done.sort(key=lambda item: item[0])
    return [est for _, est in done]


def ea_state_value(r: int) -> float:
    """Closed-form continuation value (1-r)/(r+1) of the EA two-member state."""
    if r < 1:
        raise ValueError("state index r must be >= 1")
    return (1.0 - r) / (r + 1.0)


def _poisson_weights(c: float, s_max: int | None) -> list[float]:
    """Poisson(c) pmf terms q_0..q_smax; adaptive cutoff keeps the tail < 1e-13.

    An explicit s_max that leaves more than 1e-9 tail mass is rejected, since
    truncation error would then leak into the drift values.
    """
    q = [math.exp(-c)]
    if s_max is not None:
        for s in range(1, s_max + 1):
            q.append(q[-1] * c / s)
        if 1.0 - sum(q) > 1e-9:
            raise ValueError(
                f"s_max={s_max} leaves {1.0 - sum(q):.2e} Poisson tail mass at c={c}"
            )
        return q
    s = 0
    while True:
        s += 1
        q.append(q[-1] * c / s)
        if s > c and q[-1] < _POISSON_TAIL:
            return q


def _single_zero_flip_terms(params: AnalyticDriftParams) -> tuple[float, list[float], float]:
    """P[one zero-bit and no one-bit flips], P[one zero-bit and r one-bits]
    for r = 1..r_max, and P[no zero-bit flips]."""
    c, n, y = params.c, params.n, params.y
    p = c / n
    base = y * p * (1.0 - p) ** (n - 1)
    terms = []
    t = y * (n - y) * p * p * (1.0 - p) ** (n - 2)
    for r in range(1, params.r_max + 1):
        terms.append(t)
        t *= (n - y - r) / (r + 1) * p / (1.0 - p)
    return base, terms, (1.0 - p) ** y


def ea_drift_near_optimum(params: AnalyticDriftParams) -> float:
    """Asymptotic degenerate-population drift of the (2+1)-EA at y << n."""
    base, terms, p_no_zero = _single_zero_flip_terms(params)
    numerator = base
    rejected = 0.0
    for r, t in enumerate(terms, start=1):
        numerator += t / (r + 1) * ea_state_value(r)
        rejected += t * r / (r + 1)
    progress = 1.0 - p_no_zero - rejected
    return numerator / progress


@lru_cache(maxsize=64)
def _ga_state_table(c: float, r_max: int, s_max: int | None) -> tuple[float, ...]:
    """Continuation values of the GA two-member states, solved recursively.

    For each r the balance equation is linear in the state value; the
    recursion feeds on the values at smaller r (crossover can shrink the gap).
    """
    q = _poisson_weights(c, s_max)
    table = [0.0] * (r_max + 1)
    for r in range(1, r_max + 1):
        half_r = 0.5 ** (r + 1)
        poisson_gain = sum(qs / (r + s + 1) for s, qs in enumerate(q))
        poisson_drag = sum(qs * s / (r + s + 1) for s, qs in enumerate(q))
        comb_drag = sum(math.comb(r, s) * half_r / (s + 1) for s in range(r + 1))
        self_drag = half_r * r / (r + 1)
        denominator = 2.5 - poisson_drag - self_drag - comb_drag
        if denominator <= 0.0:
            raise ArithmeticError(f"state recursion diverged at r={r}, c={c}")
        constant = (
            (1.0 - r) * poisson_gain
            + 0.5 * (1.0 - r) / (r + 1)
            + half_r * sum(math.comb(r, s) * (s + 1 - r) / (r + 1) for s in range(r))
            + half_r * (r / (r + 1)) * sum(math.comb(r, s) * table[r - s] for s in range(1, r))
            + half_r
        )
        table[r] = constant / denominator
    return tuple(table)


def ga_state_value(
    r: int, c: float, r_max: int = DEFAULT_R_MAX, s_max: int | None = None
) -> float:
    """Continuation value of the GA two-member state with gap r+1."""
    if not 1 <= r <= r_max:
        raise ValueError("state index r must lie in [1, r_max]")
    return _ga_state_table(c, r_max, s_max)[r]


def ga_drift_near_optimum(params: AnalyticDriftParams) -> float:
    """Asymptotic degenerate-population drift of the (2+1)-GA at y << n.

    Mutation events carry an extra 1/2 factor (the crossover coin), which
    cancels between numerator and progress probability.
    """
    base, terms, p_no_zero = _single_zero_flip_terms(params)
    table = _ga_state_table(params.c, params.r_max, params.s_max)
    numerator = base
    rejected = 0.0
    for r, t in enumerate(terms, start=1):
        numerator += t / (r + 1) * table[r]
        rejected += t * r / (r + 1)
    progress = 0.5 - 0.5 * (p_no_zero + rejected)
    return numerator / (2.0 * progress)


_EVALUATORS = {
    "ea": ea_drift_near_optimum,
    "ga": ga_drift_near_optimum,
}


def drift_sign_threshold(
    evaluator: str,
    n: int,
    y: int,
    c_lo: float,
    c_hi: float,
    tolerance: float = 0.01,
    r_max: int = DEFAULT_R_MAX,
) -> float:
    """Bisection root of the analytic drift in c; needs drift(c_lo) > 0 > drift(c_hi)."""
    if evaluator not in _EVALUATORS:
        raise ValueError(f"evaluator must be one of {sorted(_EVALUATORS)}")
    fn = _EVALUATORS[evaluator]

    def drift_at(c: float) -> float:
        return fn(AnalyticDriftParams(c=c, n=n, y=y, r_max=r_max))

    lo, hi = float(c_lo), float(c_hi)
    d_lo, d_hi = drift_at(lo), drift_at(hi)
    if not (d_lo > 0.0 > d_hi):
        raise ValueError(
            f"no sign change on [{c_lo}, {c_hi}]: drift({c_lo})={d_lo:.4g}, "
            f"drift({c_hi})={d_hi:.4g}"
        )
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if drift_at(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def write_drift_csv(
    estimates: list[DriftEstimate],
    config: AlgorithmConfig,
    n: int,
    path: str | Path,
) -> Path:
    """Drift profile CSV: algorithm,mu,c,n,y,mean,std_dev,std_err,samples,timeouts."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["algorithm", "mu", "c", "n", "y", "mean", "std_dev", "std_err", "samples", "timeouts"]
        )
        for est in estimates:
            writer.writerow(
                [
                    config.variant,
                    config.mu,
                    repr(config.c),
                    n,
                    est.y,
                    repr(est.mean),
                    repr(est.std_dev),
                    repr(est.std_err),
                    est.samples,
                    est.timeouts,
                ]
            )
    return path


def write_analytic_csv(
    rows: list[tuple[str, AnalyticDriftParams, float]],
    path: str | Path,
) -> Path:
    """Analytic drift CSV: algorithm,c,n,y,drift,r_max."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "c", "n", "y", "drift", "r_max"])
        for algorithm, params, value in rows:
            writer.writerow(
                [algorithm, repr(params.c), params.n, params.y, repr(value), params.r_max]
            )
    return path
