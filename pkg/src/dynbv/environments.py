"""Dynamic objectives: Dynamic BinVal, dynamic linear functions, and static OneMax.

A Round is one generation's objective instance. For Dynamic BinVal the
defining permutation is never materialized: per-position priority keys are
drawn lazily and cached, which is exactly equivalent because the relative
ranking of i.i.d. uniform keys on any position subset is a uniform ranking.
Fitness values themselves are never computed for DynBV (2^i overflows any
fixed width at n = 3000); comparisons look only at differing positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bitcore import Bitstring, RandomSource

__all__ = [
    "EnvironmentSpec",
    "Environment",
    "DynBVRound",
    "LinearRound",
    "OneMaxRound",
    "compare",
    "select_worst",
    "estimate_dominance_pk",
    "DominanceEstimate",
    "pareto_weights",
]

KINDS = ("DynBV", "DynamicLinear", "OneMax")


@dataclass(frozen=True)
class EnvironmentSpec:
    """Which objective to optimize and how often it changes.

    kind:          one of DynBV, DynamicLinear, OneMax
    beta:          Pareto shape for DynamicLinear weights (W = U^(-1/beta), scale 1)
    change_period: a fresh round is drawn every `change_period` generations
    weights:       fixed positive weights for DynamicLinear instead of redrawing
    """

    kind: str = "DynBV"
    beta: float | None = None
    change_period: int = 1
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown environment kind {self.kind!r}")
        if self.change_period < 1:
            raise ValueError("change_period must be >= 1")
        if self.kind == "DynamicLinear":
            if self.weights is not None:
                if any(w <= 0 for w in self.weights):
                    raise ValueError("fixed weights must be strictly positive")
            elif self.beta is None or self.beta <= 0:
                raise ValueError("DynamicLinear requires beta > 0 or fixed weights")

    def label(self) -> str:
        """Compact token for CSV output."""
        parts = []
        if self.kind == "DynamicLinear":
            if self.weights is not None:
                parts.append("weights=fixed")
            else:
                parts.append(f"beta={self.beta!r}")
        if self.change_period != 1:
            parts.append(f"s={self.change_period}")
        return self.kind + (f"({';'.join(parts)})" if parts else "")


class DynBVRound:
    """One DynBV objective: a uniform random priority over bit positions.

    Priority keys are lazily drawn i.i.d. uniforms, cached for the lifetime
    of the round so that every comparison within one generation sees the
    same permutation. Higher key = more significant position.
    """

    __slots__ = ("n", "_keys", "_rng")

    def __init__(self, n: int, rng: RandomSource | None):
        self.n = n
        self._keys: dict[int, float] = {}
        self._rng = rng

    @classmethod
    def from_ranking(cls, ranks: Sequence[float]) -> "DynBVRound":
        """Fixed round from explicit ranks (ranks[pos]; higher rank decides)."""
        round_ = cls(len(ranks), None)
        round_._keys = {pos: float(r) for pos, r in enumerate(ranks)}
        return round_

    def priority(self, pos: int) -> float:
        key = self._keys.get(pos)
        if key is None:
            if self._rng is None:
                raise KeyError(f"fixed DynBV round has no priority for position {pos}")
            key = self._rng.random()
            self._keys[pos] = key
        return key

    def compare(self, a: Bitstring, b: Bitstring) -> int:
        diff = a.bits ^ b.bits
        if diff == 0:
            return 0
        # Hot loop: key lookup inlined, one iteration per differing position.
        keys = self._keys
        rng = self._rng
        best_pos = -1
        best_key = -1.0
        while diff:
            low = diff & -diff
            pos = low.bit_length() - 1
            diff ^= low
            key = keys.get(pos)
            if key is None:
                if rng is None:
                    raise KeyError(f"fixed DynBV round has no priority for position {pos}")
                key = rng.random()
                keys[pos] = key
            if key > best_key:
                best_key = key
                best_pos = pos
        return 1 if (a.bits >> best_pos) & 1 else -1


class LinearRound:
    """Linear objective with fixed positive weights for one generation."""

    __slots__ = ("n", "weights")

    def __init__(self, weights: np.ndarray):
        self.n = len(weights)
        self.weights = weights

    def value(self, x: Bitstring) -> float:
        return math.fsum(self.weights[p] for p in x.one_positions())

    def compare(self, a: Bitstring, b: Bitstring) -> int:
        diff = a.bits ^ b.bits
        if diff == 0:
            return 0
        # fsum over the differing positions gives the exact sign of f(a) - f(b).
        terms = []
        abits = a.bits
        w = self.weights
        while diff:
            low = diff & -diff
            pos = low.bit_length() - 1
            diff ^= low
            terms.append(w[pos] if (abits >> pos) & 1 else -w[pos])
        delta = math.fsum(terms)
        if delta > 0:
            return 1
        if delta < 0:
            return -1
        return 0


class OneMaxRound:
    """Static OneMax: compare by ones-count."""

    __slots__ = ("n",)

    def __init__(self, n: int):
        self.n = n

    def compare(self, a: Bitstring, b: Bitstring) -> int:
        if a.ones > b.ones:
            return 1
        if a.ones < b.ones:
            return -1
        return 0


Round = DynBVRound | LinearRound | OneMaxRound


class Environment:
    """Objective factory for one run; owns the current round and its epoch."""

    __slots__ = ("spec", "n", "_round", "_epoch", "_fixed_weights")

    def __init__(self, spec: EnvironmentSpec, n: int):
        self.spec = spec
        self.n = n
        self._round: Round | None = None
        self._epoch = -1
        self._fixed_weights = (
            np.asarray(spec.weights, dtype=float) if spec.weights is not None else None
        )
        if self._fixed_weights is not None and len(self._fixed_weights) != n:
            raise ValueError("fixed weight vector length must equal n")

    def sample_round(self, generation: int, rng: RandomSource) -> Round:
        """Round for the given generation; fresh iff a new change period starts.

        Generations 1..s share the first round, s+1..2s the second, and so on.
        """
        if generation < 1:
            raise ValueError("generation index starts at 1")
        epoch = (generation - 1) // self.spec.change_period
        if epoch != self._epoch or self._round is None:
            self._round = self._fresh_round(rng)
            self._epoch = epoch
        return self._round

    def _fresh_round(self, rng: RandomSource) -> Round:
        kind = self.spec.kind
        if kind == "DynBV":
            return DynBVRound(self.n, rng)
        if kind == "OneMax":
            return OneMaxRound(self.n)
        if self._fixed_weights is not None:
            return LinearRound(self._fixed_weights)
        return LinearRound(pareto_weights(self.n, self.spec.beta, rng))


def compare(round_: Round, a: Bitstring, b: Bitstring) -> int:
    """Ordering of a and b under the round's objective: -1 (a<b), 0, or +1."""
    if a.n != b.n or a.n != round_.n:
        raise ValueError("compared bitstrings must match the round's length")
    return round_.compare(a, b)


def select_worst(round_: Round, candidates: Sequence[Bitstring], rng: RandomSource) -> int:
    """Index of a worst candidate under the round, uniform among ties."""
    if not candidates:
        raise ValueError("select_worst needs at least one candidate")
    worst = [0]
    for i in range(1, len(candidates)):
        order = round_.compare(candidates[i], candidates[worst[0]])
        if order < 0:
            worst = [i]
        elif order == 0:
            worst.append(i)
    if len(worst) == 1:
        return worst[0]
    return worst[rng.randint(len(worst))]


def pareto_weights(n: int, beta: float, rng: RandomSource) -> np.ndarray:
    """n i.i.d. Pareto(beta) weights via inverse CDF, scale 1."""
    u = rng.generator.random(n)
    return (1.0 - u) ** (-1.0 / beta)


@dataclass(frozen=True)
class DominanceEstimate:
    """Monte-Carlo estimate of the probability that the largest of k weights
    exceeds the sum of the other k-1."""

    estimate: float
    std_err: float
    trials: int


def estimate_dominance_pk(
    k: int, beta: float, trials: int, rng: RandomSource
) -> DominanceEstimate:
    """Estimate p_k = P[W_(k) > sum of the others] for k i.i.d. Pareto(beta) weights."""
    if k < 2:
        raise ValueError("dominance needs at least k = 2 weights")
    if beta <= 0:
        raise ValueError("Pareto shape must be positive")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    hits = 0
    chunk = 1 << 16
    remaining = trials
    while remaining > 0:
        m = min(chunk, remaining)
        w = (1.0 - rng.generator.random((m, k))) ** (-1.0 / beta)
        top = w.max(axis=1)
        rest = w.sum(axis=1) - top
        hits += int(np.count_nonzero(top > rest))
        remaining -= m
    p = hits / trials
    se = math.sqrt(p * (1.0 - p) / trials)
    return DominanceEstimate(p, se, trials)
