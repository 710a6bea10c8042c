"""(mu+1)-EA, (mu+1)-GA, and (mu+1)-GA-NoCopy as one parameterized step machine.

Each generation creates one offspring (mutation, or for the GA variants a
fair-coin choice between mutation and bitwise uniform crossover), then removes
the worst of the mu+1 candidates under the current round, breaking ties
uniformly. Runtime is counted in generations.

The run loop fast-forwards through degenerate populations: while all members
equal some x, only a mutation step that flips at least one zero-bit of x can
change the population multiset (crossover yields a copy, and an offspring
that loses one-bits is strictly dominated, hence always removed). The number
of such inert generations is geometric, so they are skipped in one draw and
the next effective mutation is sampled conditioned on hitting a zero-bit.
This is distributionally identical to stepping every generation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bitcore import Bitstring, RandomSource, mutate, new_uniform, uniform_crossover
from .environments import Environment, EnvironmentSpec, Round, select_worst

__all__ = [
    "VARIANTS",
    "AlgorithmConfig",
    "PopulationState",
    "StepEvent",
    "RunRecord",
    "init_population",
    "step",
    "run",
    "is_degenerate",
]

VARIANTS = ("EA", "GA", "GA-NoCopy")


@dataclass(frozen=True)
class AlgorithmConfig:
    """Population size, mutation parameter c (rate c/n), and offspring rule."""

    mu: int
    c: float
    variant: str = "EA"
    crossover_probability: float = 0.5

    def __post_init__(self):
        if self.mu < 1:
            raise ValueError("population size must be >= 1")
        if self.c <= 0:
            raise ValueError("mutation parameter must be positive")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "GA-NoCopy" and self.mu < 2:
            raise ValueError("GA-NoCopy needs mu >= 2 to pick distinct parents")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise ValueError("crossover probability must be in [0, 1]")

    @property
    def effective_crossover_probability(self) -> float:
        """Crossover probability actually used; the EA always mutates."""
        return 0.0 if self.variant == "EA" else self.crossover_probability

    def name(self) -> str:
        return f"({self.mu}+1)-{self.variant} c={self.c:g}"


@dataclass(frozen=True)
class PopulationState:
    members: tuple[Bitstring, ...]
    generation: int = 0


@dataclass(frozen=True)
class StepEvent:
    """What one generation did, for drift bookkeeping."""

    offspring_kind: str  # "mutation" or "crossover"
    accepted: bool  # offspring survived selection
    offspring_is_copy: bool  # offspring bit-identical to some pre-step member
    offspring: Bitstring
    new_best_ones: int | None = None  # set when the best ones-count improved


@dataclass
class RunRecord:
    """Outcome of one run: generations used, success flag, fixed-target hits."""

    generations: int
    success: bool
    first_hit: dict[int, int] = field(default_factory=dict)
    seed: int | None = None


def init_population(config: AlgorithmConfig, n: int, rng: RandomSource) -> PopulationState:
    """mu independent uniform random members."""
    if n < 1:
        raise ValueError("bitstring length must be >= 1")
    return PopulationState(tuple(new_uniform(n, rng) for _ in range(config.mu)))


def is_degenerate(state: PopulationState) -> bool:
    """True iff all mu members are bit-identical."""
    return _all_equal(state.members)


def _all_equal(members) -> bool:
    first = members[0].bits
    for m in members:
        if m.bits != first:
            return False
    return True


def _create_offspring(
    members, config: AlgorithmConfig, rng: RandomSource
) -> tuple[Bitstring, str]:
    xp = config.effective_crossover_probability
    if xp > 0.0 and rng.coin(xp):
        mu = len(members)
        i = rng.randint(mu)
        if config.variant == "GA-NoCopy":
            j = rng.randint(mu - 1)
            if j >= i:
                j += 1
        else:
            j = rng.randint(mu)
        return uniform_crossover(members[i], members[j], rng), "crossover"
    parent = members[rng.randint(len(members))]
    return mutate(parent, config.c, rng), "mutation"


def _select(members: list[Bitstring], offspring: Bitstring, round_: Round, rng: RandomSource) -> bool:
    """Remove the worst of members + offspring in place; True iff offspring survived."""
    candidates = members + [offspring]
    worst = select_worst(round_, candidates, rng)
    accepted = worst != len(members)
    del candidates[worst]
    members[:] = candidates
    return accepted


def step(
    state: PopulationState,
    config: AlgorithmConfig,
    round_: Round,
    rng: RandomSource,
) -> tuple[PopulationState, StepEvent]:
    """One generation: create an offspring, remove the worst of the mu+1."""
    if len(state.members) != config.mu:
        raise ValueError("population size does not match the configuration")
    members = list(state.members)
    best_before = max(m.ones for m in members)
    offspring, kind = _create_offspring(members, config, rng)
    is_copy = any(offspring.bits == m.bits for m in members)
    accepted = _select(members, offspring, round_, rng)
    best_after = max(m.ones for m in members)
    event = StepEvent(
        offspring_kind=kind,
        accepted=accepted,
        offspring_is_copy=is_copy,
        offspring=offspring,
        new_best_ones=best_after if best_after > best_before else None,
    )
    return PopulationState(tuple(members), state.generation + 1), event


def _mutation_step_probability(config: AlgorithmConfig) -> float:
    return 1.0 - config.effective_crossover_probability


def _escape_rate(config: AlgorithmConfig, n: int, y: int) -> float:
    """Per-generation probability that a degenerate population can change:
    a mutation step flipping at least one of the y zero-bits."""
    p = config.c / n
    return _mutation_step_probability(config) * (1.0 - (1.0 - p) ** y)


def _class_flip_mask(x: Bitstring, want_ones: bool, k: int, rng: RandomSource) -> int:
    """OR of k distinct position bits drawn uniformly among the 1-bits
    (or 0-bits) of x. Rejection sampling when the class is dense, index
    sampling over the materialized positions when it is sparse."""
    n = x.n
    available = x.ones if want_ones else x.n - x.ones
    mask = 0
    if 4 * available >= n:
        bits = x.bits if want_ones else ~x.bits
        rand = rng.random
        count = 0
        while count < k:
            p = int(rand() * n)
            if p >= n:
                p = n - 1
            b = 1 << p
            if (bits >> p) & 1 and not mask & b:
                mask |= b
                count += 1
        return mask
    positions = x.one_positions() if want_ones else x.zero_positions()
    for i in rng.sample_positions(available, k):
        mask |= 1 << int(positions[i])
    return mask


def _conditioned_escape_offspring(
    x: Bitstring, config: AlgorithmConfig, rng: RandomSource
) -> Bitstring:
    """Mutation offspring of x conditioned on flipping >= 1 zero-bit.

    Zero-flip and one-flip counts are independent binomials; only the zero
    count is conditioned. Positions are then chosen uniformly within each
    group, matching the unconditioned operator restricted to this event.
    """
    n = x.n
    y = x.zeros
    p = config.c / n
    mask = _class_flip_mask(x, False, rng.binomial_at_least_one(y, p), rng)
    k1 = rng.binomial(n - y, p)
    if k1:
        mask |= _class_flip_mask(x, True, k1, rng)
    return Bitstring(n, x.bits ^ mask)


def run(
    config: AlgorithmConfig,
    env_spec: EnvironmentSpec,
    n: int,
    limit: int,
    rng: RandomSource,
    seed: int | None = None,
) -> RunRecord:
    """Run until some member is the all-ones string or the generation cap hits.

    Success found during initialization counts as 0 generations. First-hit
    generations are recorded for every best-of-population ones-count level.
    """
    if limit < 1:
        raise ValueError("generation limit must be >= 1")
    env = Environment(env_spec, n)
    members = list(init_population(config, n, rng).members)
    best = max(m.ones for m in members)
    first_hit = {level: 0 for level in range(best + 1)}
    if best == n:
        return RunRecord(0, True, first_hit, seed)

    gen = 0
    degenerate = _all_equal(members)
    while gen < limit:
        if degenerate:
            rate = _escape_rate(config, n, members[0].zeros)
            if rate <= 0.0:
                # Crossover-only configuration can never leave a degenerate
                # population; the run is stuck until the cap.
                break
            gen += rng.geometric(rate)
            if gen > limit:
                break
            offspring = _conditioned_escape_offspring(members[0], config, rng)
        else:
            gen += 1
            offspring, _ = _create_offspring(members, config, rng)
        round_ = env.sample_round(gen, rng)
        accepted = _select(members, offspring, round_, rng)
        degenerate = _all_equal(members)
        # Removals never raise the best ones-count, so the fixed-target record
        # can only advance through an accepted offspring.
        if accepted and offspring.ones > best:
            for level in range(best + 1, offspring.ones + 1):
                first_hit[level] = gen
            best = offspring.ones
            if best == n:
                return RunRecord(gen, True, first_hit, seed)

    return RunRecord(limit, False, first_hit, seed)
