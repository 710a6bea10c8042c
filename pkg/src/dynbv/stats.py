"""Wilcoxon-Mann-Whitney rank-sum testing and the largest-significant-factor search.

The U statistic uses midranks for ties. P-values come from exact enumeration
of all pooled arrangements when both samples have at most EXACT_LIMIT values,
otherwise from the normal approximation with tie-corrected variance and
continuity correction. Censored runs enter at their cap value, which
understates the slow sample and therefore only weakens claimed significance.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

__all__ = [
    "RuntimeSample",
    "MannWhitneyResult",
    "FactorResult",
    "mann_whitney_u",
    "max_significant_factor",
    "write_comparison_csv",
]

EXACT_LIMIT = 10

ALTERNATIVES = ("a_less", "a_greater", "two_sided")


@dataclass(frozen=True)
class RuntimeSample:
    """Observed generation counts with censoring flags (run hit the cap)."""

    values: tuple[float, ...]
    censored: tuple[bool, ...] = ()

    def __post_init__(self):
        if not self.values:
            raise ValueError("a runtime sample needs at least one value")
        if self.censored and len(self.censored) != len(self.values):
            raise ValueError("censoring flags must parallel the values")
        if not self.censored:
            object.__setattr__(self, "censored", (False,) * len(self.values))

    @classmethod
    def from_runs(cls, generations: Sequence[float], successes: Sequence[bool]) -> "RuntimeSample":
        return cls(tuple(float(g) for g in generations), tuple(not s for s in successes))

    def uncensored(self) -> "RuntimeSample":
        kept = [(v, c) for v, c in zip(self.values, self.censored) if not c]
        if not kept:
            raise ValueError("all values are censored")
        return RuntimeSample(tuple(v for v, _ in kept), tuple(c for _, c in kept))


@dataclass(frozen=True)
class MannWhitneyResult:
    u: float
    p_value: float


def _midranks(pooled: Sequence[float]) -> list[float]:
    order = sorted(range(len(pooled)), key=pooled.__getitem__)
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _u_statistic(ranks: Sequence[float], m: int) -> float:
    return sum(ranks[:m]) - m * (m + 1) / 2


@lru_cache(maxsize=128)
def _u_counts_without_ties(m: int, n: int) -> tuple[int, ...]:
    """Exact null counts of U over 0..m*n for tie-free pools.

    Classic recurrence on the largest pooled value: if it belongs to sample a
    it beats all n others, otherwise U is unchanged.
    """
    counts = {(0, 0): [1]}
    for mm in range(m + 1):
        for nn in range(n + 1):
            if (mm, nn) in counts:
                continue
            size = mm * nn + 1
            row = [0] * size
            if mm > 0:
                prev = counts[(mm - 1, nn)]
                for u in range(nn, size):
                    row[u] += prev[u - nn] if u - nn < len(prev) else 0
            if nn > 0:
                prev = counts[(mm, nn - 1)]
                for u in range(min(size, len(prev))):
                    row[u] += prev[u]
            counts[(mm, nn)] = row
    return tuple(counts[(m, n)])


def _exact_p(pooled: list[float], m: int, u_obs: float, alternative: str) -> float:
    """Permutation null over all C(m+n, m) assignments, ties included."""
    n = len(pooled) - m
    eps = 1e-9
    if len(set(pooled)) == len(pooled):
        counts = _u_counts_without_ties(m, n)
        total = sum(counts)
        u_int = int(round(u_obs))
        at_most = sum(counts[: u_int + 1])
        at_least = sum(counts[u_int:])
    else:
        ranks = _midranks(pooled)
        offset = m * (m + 1) / 2
        at_most = at_least = total = 0
        for combo in itertools.combinations(range(len(pooled)), m):
            u = sum(ranks[i] for i in combo) - offset
            if u <= u_obs + eps:
                at_most += 1
            if u >= u_obs - eps:
                at_least += 1
            total += 1
    p_less = at_most / total
    p_greater = at_least / total
    if alternative == "a_less":
        return p_less
    if alternative == "a_greater":
        return p_greater
    return min(1.0, 2.0 * min(p_less, p_greater))


def _normal_p(pooled: list[float], m: int, u_obs: float, alternative: str) -> float:
    n_total = len(pooled)
    n = n_total - m
    counts: dict[float, int] = {}
    for v in pooled:
        counts[v] = counts.get(v, 0) + 1
    tie_term = sum(t**3 - t for t in counts.values())
    variance = m * n / 12 * ((n_total + 1) - tie_term / (n_total * (n_total - 1)))
    if variance <= 0:
        return 1.0
    sd = math.sqrt(variance)
    mean = m * n / 2

    def cdf_with_continuity(u: float) -> float:
        return 0.5 * math.erfc(-((u - mean + 0.5) / sd) / math.sqrt(2))

    def sf_with_continuity(u: float) -> float:
        return 0.5 * math.erfc(((u - mean - 0.5) / sd) / math.sqrt(2))

    if alternative == "a_less":
        return min(1.0, cdf_with_continuity(u_obs))
    if alternative == "a_greater":
        return min(1.0, sf_with_continuity(u_obs))
    return min(1.0, 2.0 * min(cdf_with_continuity(u_obs), sf_with_continuity(u_obs)))


def _values(sample) -> list[float]:
    if isinstance(sample, RuntimeSample):
        return list(sample.values)
    return [float(v) for v in sample]


def mann_whitney_u(
    a,
    b,
    alternative: str = "two_sided",
    method: str = "auto",
) -> MannWhitneyResult:
    """Rank-sum U of sample a (with midranks) and its p-value.

    alternative "a_less" tests whether a tends to be smaller than b.
    method: "auto" enumerates exactly when both sizes are <= EXACT_LIMIT.
    """
    if alternative not in ALTERNATIVES:
        raise ValueError(f"alternative must be one of {ALTERNATIVES}")
    if method not in ("auto", "exact", "normal"):
        raise ValueError("method must be auto, exact, or normal")
    va, vb = _values(a), _values(b)
    if not va or not vb:
        raise ValueError("both samples must be nonempty")
    pooled = va + vb
    m = len(va)
    u_obs = _u_statistic(_midranks(pooled), m)
    use_exact = method == "exact" or (
        method == "auto" and m <= EXACT_LIMIT and len(vb) <= EXACT_LIMIT
    )
    if use_exact:
        p = _exact_p(pooled, m, u_obs, alternative)
    else:
        p = _normal_p(pooled, m, u_obs, alternative)
    return MannWhitneyResult(u_obs, p)


@dataclass(frozen=True)
class FactorResult:
    """Largest factor d such that d * fast is still significantly below slow.

    d_max is None when the comparison is not significant at d = 1; bracket is
    the bisection interval containing the step of the p-value past alpha.

    Because d is chosen in hindsight from the same data, the factor is an
    a-posteriori description of the gap, not a pre-registered significance
    claim; treat it as a magnitude indicator.
    """

    d_max: float | None
    alpha: float
    p_at_d_max: float | None
    p_at_one: float
    bracket: tuple[float, float] | None = field(default=None)

    @property
    def significant(self) -> bool:
        return self.d_max is not None


_D_CEILING = 2.0**60


def max_significant_factor(
    fast: RuntimeSample,
    slow: RuntimeSample,
    alpha: float = 0.05,
    tolerance: float = 1e-3,
    censored_mode: str = "cap",
) -> FactorResult:
    """Largest d >= 1 with a significant one-sided test of d * fast < slow.

    The p-value is a step function of d, so bisection brackets its jump past
    alpha to within the tolerance. censored_mode "cap" keeps censored values
    at their cap (conservative); "drop" removes censored runs entirely.
    """
    if censored_mode not in ("cap", "drop"):
        raise ValueError("censored_mode must be 'cap' or 'drop'")
    if censored_mode == "drop":
        fast = fast.uncensored()
        slow = slow.uncensored()
    slow_values = list(slow.values)
    fast_values = list(fast.values)

    def p_at(d: float) -> float:
        scaled = [d * v for v in fast_values]
        return mann_whitney_u(scaled, slow_values, alternative="a_less").p_value

    p_one = p_at(1.0)
    if p_one > alpha:
        return FactorResult(None, alpha, None, p_one)

    lo, hi = 1.0, 2.0
    while p_at(hi) <= alpha:
        lo = hi
        hi *= 2.0
        if hi > _D_CEILING:
            # No finite jump found (e.g. zero runtimes in fast); report the floor.
            return FactorResult(lo, alpha, p_at(lo), p_one, (lo, hi))
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if p_at(mid) <= alpha:
            lo = mid
        else:
            hi = mid
    return FactorResult(lo, alpha, p_at(lo), p_one, (lo, hi))


def write_comparison_csv(
    rows: list[tuple[str, str, str, FactorResult]],
    path: str | Path,
) -> Path:
    """Comparison CSV: cell_fast,cell_slow,alternative,alpha,d_max,p_at_d_max."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cell_fast", "cell_slow", "alternative", "alpha", "d_max", "p_at_d_max"])
        for cell_fast, cell_slow, alternative, result in rows:
            writer.writerow(
                [
                    cell_fast,
                    cell_slow,
                    alternative,
                    repr(result.alpha),
                    "NA" if result.d_max is None else repr(result.d_max),
                    "NA" if result.p_at_d_max is None else repr(result.p_at_d_max),
                ]
            )
    return path
