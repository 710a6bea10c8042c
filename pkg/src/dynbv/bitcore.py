"""Bitstrings, standard bit mutation, uniform crossover, and seeded randomness.

Bitstrings are packed into a single Python integer with a cached ones-count,
so XOR/popcount run at machine speed even for n in the thousands. All
randomness flows through :class:`RandomSource`, which derives two engines
from one seed: a C-speed scalar stream for the generation loop and a numpy
generator for vectorized work.
"""

from __future__ import annotations

import hashlib
import math
import random as _stdlib_random
from typing import Iterable

import numpy as np

__all__ = [
    "RandomSource",
    "Bitstring",
    "entropy_word",
    "new_uniform",
    "mutate",
    "uniform_crossover",
    "uniform_with_zeros",
]


def entropy_word(value: int | str) -> int:
    """Map a seed component to a stable 64-bit word (independent of PYTHONHASHSEED)."""
    if isinstance(value, int) and 0 <= value < 2**64:
        return value
    digest = hashlib.sha256(repr(value).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class RandomSource:
    """Deterministic random stream: same seed material, same sequence of draws.

    Scalar draws (uniform, Bernoulli, integer, binomial, geometric, raw bits)
    come from a Mersenne-Twister stream; `generator` exposes a numpy PCG64
    stream for vectorized sampling. Both are derived from the same seed.
    """

    __slots__ = ("_seq", "_scalar", "random", "getrandbits", "_generator")

    def __init__(self, seed: int | np.random.SeedSequence | None = 0):
        if isinstance(seed, np.random.SeedSequence):
            seq = seed
        else:
            seq = np.random.SeedSequence(seed)
        self._seq = seq
        scalar_seed = int.from_bytes(seq.generate_state(4, np.uint64).tobytes(), "little")
        self._scalar = _stdlib_random.Random(scalar_seed)
        # Bound C methods; these are the hot path of the generation loop.
        self.random = self._scalar.random
        self.getrandbits = self._scalar.getrandbits
        self._generator: np.random.Generator | None = None

    @classmethod
    def from_entropy(cls, *components: int | str) -> "RandomSource":
        """Derive an independent stream from (seed, label, index, ...) material."""
        words = [entropy_word(c) for c in components]
        return cls(np.random.SeedSequence(words))

    @property
    def generator(self) -> np.random.Generator:
        """Numpy generator for vectorized draws, derived from the same seed."""
        if self._generator is None:
            self._generator = np.random.Generator(np.random.PCG64(self._seq))
        return self._generator

    def coin(self, p: float) -> bool:
        """Bernoulli(p)."""
        return self.random() < p

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        i = int(self.random() * n)
        return i if i < n else n - 1

    def binomial(self, n: int, p: float) -> int:
        """Binomial(n, p) sample count by sequential inversion."""
        if p <= 0.0 or n == 0:
            return 0
        if p >= 1.0:
            return n
        if n * p > 50.0:
            return int(self.generator.binomial(n, p))
        u = self.random()
        pk = (1.0 - p) ** n
        cdf = pk
        k = 0
        ratio = p / (1.0 - p)
        while u > cdf and k < n:
            k += 1
            pk *= (n - k + 1) / k * ratio
            cdf += pk
        return k

    def binomial_at_least_one(self, n: int, p: float) -> int:
        """Binomial(n, p) conditioned on being >= 1, without rejection loops."""
        if p >= 1.0:
            return n
        p0 = (1.0 - p) ** n
        v = p0 + self.random() * (1.0 - p0)
        pk = p0
        cdf = p0
        k = 0
        ratio = p / (1.0 - p)
        while v >= cdf and k < n:
            k += 1
            pk *= (n - k + 1) / k * ratio
            cdf += pk
        return max(k, 1)

    def geometric(self, p: float) -> int:
        """Number of trials up to and including the first success, p in (0, 1]."""
        if p >= 1.0:
            return 1
        return int(math.log1p(-self.random()) / math.log1p(-p)) + 1

    def bits(self, n: int) -> int:
        """n independent fair bits packed into an integer."""
        return self.getrandbits(n)

    def sample_positions(self, n: int, k: int) -> list[int]:
        """k distinct positions drawn uniformly from range(n)."""
        if k < 0 or k > n:
            raise ValueError(f"cannot draw {k} distinct positions from {n}")
        if k == n:
            return list(range(n))
        if 2 * k > n:
            # Cheaper to pick the complement when more than half is requested.
            excluded = set(self.sample_positions(n, n - k))
            return [p for p in range(n) if p not in excluded]
        chosen: set[int] = set()
        out: list[int] = []
        while len(out) < k:
            p = self.randint(n)
            if p not in chosen:
                chosen.add(p)
                out.append(p)
        return out


class Bitstring:
    """Fixed-length binary search point; immutable by convention."""

    __slots__ = ("n", "bits", "ones")

    def __init__(self, n: int, bits: int):
        self.n = n
        self.bits = bits
        self.ones = bits.bit_count()

    @property
    def zeros(self) -> int:
        return self.n - self.ones

    @property
    def is_all_ones(self) -> bool:
        return self.ones == self.n

    def bit(self, pos: int) -> int:
        return (self.bits >> pos) & 1

    def zero_positions(self) -> np.ndarray:
        """Positions holding 0, as an int array (vectorized unpack)."""
        return self._positions_of(0)

    def one_positions(self) -> np.ndarray:
        """Positions holding 1, as an int array."""
        return self._positions_of(1)

    def _positions_of(self, value: int) -> np.ndarray:
        nbytes = (self.n + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        unpacked = np.unpackbits(raw, bitorder="little")[: self.n]
        return np.nonzero(unpacked == value)[0]

    def to01(self) -> str:
        """Bits as a string, position 0 first."""
        return format(self.bits, f"0{self.n}b")[::-1]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Bitstring)
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __repr__(self) -> str:
        s = self.to01()
        if self.n > 32:
            s = s[:29] + "..."
        return f"Bitstring({s!r})"


def from_positions(n: int, one_positions: Iterable[int]) -> Bitstring:
    """Bitstring of length n with 1s exactly at the given positions."""
    bits = 0
    for p in one_positions:
        bits |= 1 << p
    return Bitstring(n, bits)


def from01(text: str) -> Bitstring:
    """Parse a 0/1 string, position 0 first (inverse of :meth:`Bitstring.to01`)."""
    return Bitstring(len(text), int(text[::-1] or "0", 2))


def new_uniform(n: int, rng: RandomSource) -> Bitstring:
    """Uniform random bitstring: each bit is 1 with probability 1/2."""
    if n < 1:
        raise ValueError("bitstring length must be >= 1")
    return Bitstring(n, rng.bits(n))


def mutate(x: Bitstring, c: float, rng: RandomSource) -> Bitstring:
    """Standard bit mutation: flip each bit independently with probability c/n.

    Implemented by drawing the flip count from Binomial(n, c/n) and choosing
    that many distinct positions, which is distributionally identical to
    per-bit coins at O(flips) expected cost.
    """
    if c < 0 or c > x.n:
        raise ValueError(f"mutation parameter must satisfy 0 <= c <= n, got {c}")
    n = x.n
    k = rng.binomial(n, c / n)
    if k == 0:
        return x
    mask = 0
    if 2 * k > n:
        for p in rng.sample_positions(n, k):
            mask |= 1 << p
    else:
        # Rejection directly on the mask; duplicates are rare for k << n.
        count = 0
        rand = rng.random
        while count < k:
            p = int(rand() * n)
            bit = 1 << (p if p < n else n - 1)
            if not mask & bit:
                mask |= bit
                count += 1
    return Bitstring(n, x.bits ^ mask)


def uniform_crossover(a: Bitstring, b: Bitstring, rng: RandomSource) -> Bitstring:
    """Bitwise uniform crossover: each output bit comes from a or b with probability 1/2."""
    if a.n != b.n:
        raise ValueError(f"crossover parents must share length, got {a.n} and {b.n}")
    diff = a.bits ^ b.bits
    if diff == 0:
        return a
    # Only differing positions need a coin; agreement positions are fixed.
    mask = rng.bits(a.n) & diff
    return Bitstring(a.n, a.bits ^ mask)


def uniform_with_zeros(n: int, y: int, rng: RandomSource) -> Bitstring:
    """Bitstring with exactly y zeros placed uniformly at random."""
    if not 0 <= y <= n:
        raise ValueError(f"zero count must be in [0, n], got {y}")
    bits = (1 << n) - 1
    for p in rng.sample_positions(n, y):
        bits ^= 1 << p
    return Bitstring(n, bits)
