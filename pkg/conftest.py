"""
Shared pytest fixtures: pinned settings and random instance factories.
"""

from fractions import Fraction

import numpy as np
import pytest

from welfareshare import settings
from welfareshare.model import Instance, MatchingInstance

PINNED = {
    'ENUMERATION_BOUND': 14,
    'RP_EXACT_BOUND': 10,
    'SHAPLEY_PERMUTATION_BOUND': 8,
    'DECOMPOSE_EXACT_BOUND': 8,
    'GENERAL_COMPONENT_BOUND': 6,
    'ALTERNATIVE_ENUMERATION_BOUND': 40320,
    'MC_SAMPLES': 100000,
    'MC_SEED': 0,
    'MC_BLOCK_SIZE': 4096,
    'DECIMAL_DIGITS': 6,
}


@pytest.fixture(autouse=True)
def pinned_settings(monkeypatch):
    """Ignore any local .env so every run sees the documented defaults"""
    for name, value in PINNED.items():
        monkeypatch.setattr(settings, name, value)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_matching(rng):
    """Random square (or n x m) matching instance with small integer values"""
    def factory(n, m=None, low=0, high=10):
        m = n if m is None else m
        values = rng.integers(low, high, size=(n, m))
        return MatchingInstance(tuple(tuple(int(v) for v in row) for row in values))
    return factory


@pytest.fixture
def make_general(rng):
    """Random general instance, n agents x k alternatives"""
    def factory(n, k, low=-5, high=10):
        values = rng.integers(low, high, size=(n, k))
        return Instance(tuple(tuple(int(v) for v in row) for row in values))
    return factory


@pytest.fixture
def make_blocks(rng):
    """
    Square matching instance made of independent blocks.

    Agents of a block share one strict ranking of the block's items, all
    valued in [100, 200). An agent values the items of another block c with
    distinct values in [10c, 10c + 10), so later blocks are always preferred
    among outside items and every row is free of ties.
    Agents and items are listed block by block.

    Returns:
        (MatchingInstance, list of (agents, items) index tuples)
    """
    def factory(sizes):
        n = sum(sizes)
        offsets = np.cumsum([0] + list(sizes))
        values = [[Fraction(0)] * n for _ in range(n)]
        blocks = []
        for b, size in enumerate(sizes):
            agents = tuple(range(offsets[b], offsets[b + 1]))
            items = agents
            blocks.append((agents, items))
            ranking = rng.permutation(items)
            for a in agents:
                levels = sorted(rng.choice(np.arange(100, 200), size=size, replace=False), reverse=True)
                for item, level in zip(ranking, levels):
                    values[a][int(item)] = Fraction(int(level))
                for c, other in enumerate(sizes):
                    if c == b:
                        continue
                    outside = rng.choice(10, size=other, replace=False)
                    for item, level in zip(range(offsets[c], offsets[c + 1]), outside):
                        values[a][item] = Fraction(10 * c + int(level))
        return MatchingInstance(tuple(tuple(row) for row in values)), blocks
    return factory
