"""Bitmask helpers for agent subsets"""

from itertools import combinations


def to_mask(subset):
    """Accept an int mask or an iterable of agent indices"""
    if isinstance(subset, int):
        return subset
    mask = 0
    for i in subset:
        mask |= 1 << i
    return mask


def members(mask):
    """Agent indices in the mask, ascending"""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask):
    return bin(mask).count('1')


def full_mask(n):
    return (1 << n) - 1


def nonempty_subsets(n):
    """All nonempty masks ordered by cardinality, then lexicographically by members"""
    for size in range(1, n + 1):
        for combo in combinations(range(n), size):
            yield to_mask(combo)


def submasks(mask):
    """All submasks of mask (including 0 and mask itself)"""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def label_subset(mask, labels):
    return '{' + ', '.join(str(labels[i]) for i in members(mask)) + '}'
