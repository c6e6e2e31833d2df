"""Seeded uniform random instances with an empty buffer."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Arrangement, Geometry, Instance, Kind, StackError


@dataclass(frozen=True)
class Setup:
    w: int
    d: int
    n: int
    instance_count: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.w < 2:
            raise StackError(f"w must be >= 2, got {self.w}")
        if self.d < 1:
            raise StackError(f"d must be >= 1, got {self.d}")
        if not 0 <= self.n <= self.w * self.d:
            raise StackError(f"n={self.n} outside 0..w*d={self.w * self.d}")

    @property
    def geometry(self) -> Geometry:
        return Geometry(self.w + 1, self.d)


@lru_cache(maxsize=None)
def _fillings(parts: int, total: int, cap: int) -> int:
    """Number of ways to write ``total`` as ``parts`` ordered counts in 0..cap."""
    if parts == 0:
        return 1 if total == 0 else 0
    return sum(_fillings(parts - 1, total - c, cap) for c in range(min(cap, total) + 1))


def _random_arrangement(rng: np.random.Generator, w: int, d: int, n: int) -> Arrangement:
    # every arrangement is a (count vector, permutation) pair with the same
    # n! permutations per vector, so a uniform vector gives a uniform arrangement
    counts = []
    left = n
    for k in range(w):
        options = list(range(min(d, left) + 1))
        weights = np.array([_fillings(w - k - 1, left - c, d) for c in options], dtype=float)
        c = int(rng.choice(options, p=weights / weights.sum()))
        counts.append(c)
        left -= c
    objects = (rng.permutation(n) + 1).tolist()
    stacks, pos = [], 0
    for c in counts:
        stacks.append(tuple(objects[pos:pos + c]))
        pos += c
    stacks.append(())
    return Arrangement(Geometry(w + 1, d), tuple(stacks))


def generate_instance(setup: Setup, seed: int, kind: Kind = Kind.LABELED) -> Instance:
    """Start and goal drawn independently and uniformly, buffer stack empty."""
    if setup.n > setup.w * setup.d:
        raise StackError(f"n={setup.n} exceeds w*d={setup.w * setup.d}")
    rng = np.random.default_rng(seed)
    start = _random_arrangement(rng, setup.w, setup.d, setup.n)
    goal = _random_arrangement(rng, setup.w, setup.d, setup.n)
    return Instance(setup.geometry, start, goal, kind)


def instance_seed(master: int, index: int) -> int:
    """Independent 64-bit seed for instance ``index`` of a master stream."""
    state = np.random.SeedSequence([master & 0xFFFFFFFFFFFFFFFF, index]).generate_state(2)
    return int(state[0]) << 32 | int(state[1])


def instance_stream(setup: Setup, kind: Kind = Kind.LABELED):
    for i in range(setup.instance_count):
        s = instance_seed(setup.seed, i)
        yield i, s, generate_instance(setup, s, kind)
