"""
Disagreement mechanisms: Uniform, Random Priority (exact and sampled) and Eating.

Random Priority on a matching instance is serial selection of items. An agent
whose favourite remaining items are tied is put on hold; whenever some set of
held agents is tight (as many desired items as agents) its members are served.
On a general instance Random Priority is random serial dictatorship: each
agent in turn discards the alternatives that are not among its favourites.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import factorial
from typing import Tuple

import numpy as np
from tqdm import tqdm

from welfareshare import settings
from welfareshare.exceptions import IncompatibleOptionsError, InstanceError
from welfareshare.model import (
    EATING, RP_EXACT, RP_MONTECARLO, UNIFORM,
    DisagreementPoint, Instance, MatchingInstance, Provenance,
)
from welfareshare.welfare import check_bound

logger = logging.getLogger('welfareshare')

ZERO = Fraction(0)

MODES = ('uniform', 'rp', 'rp-mc', 'eating', 'explicit', 'alternative')


def uniform(inst):
    """Every alternative equally likely (each item equally likely for a matching agent)"""
    utilities = tuple(sum(row, ZERO) / len(row) for row in inst.values)
    return DisagreementPoint(utilities, Provenance(UNIFORM))


# --- Random Priority --------------------------------------------------------

def _resolve_tight(held, remaining):
    """Serve minimal tight sets of held agents until none is left"""
    while held:
        tight = None
        agents = sorted(held)
        for size in range(1, len(agents) + 1):
            for group in combinations(agents, size):
                union = set().union(*(held[a] for a in group))
                if len(union) == size:
                    tight = (group, union)
                    break
            if tight:
                break
        if tight is None:
            return
        group, union = tight
        remaining.difference_update(union)
        for a in group:
            del held[a]
        for a in held:
            held[a] -= union


def serial_dictatorship(m, order):
    """
    Utilities of one serial selection run over a matching instance.

    Held agents always end up with a desired item, so their utility is fixed
    when they are put on hold.
    """
    values = m.values
    remaining = set(range(m.n_items))
    utilities = [ZERO] * m.n_agents
    held = {}
    for a in order:
        row = values[a]
        best = max(row[j] for j in remaining)
        desired = {j for j in remaining if row[j] == best}
        utilities[a] = best
        if len(desired) == 1:
            (j,) = desired
            remaining.discard(j)
            for h in held:
                held[h].discard(j)
        else:
            held[a] = desired
        _resolve_tight(held, remaining)
    return tuple(utilities)


def random_dictatorship(inst, order):
    """Utilities of one serial dictatorship run over a general instance"""
    alive = range(inst.n_alternatives)
    for a in order:
        row = inst.values[a]
        best = max(row[k] for k in alive)
        alive = [k for k in alive if row[k] == best]
    chosen = alive[0]
    return tuple(row[chosen] for row in inst.values)


def _run_order(inst, order):
    if isinstance(inst, MatchingInstance):
        return serial_dictatorship(inst, order)
    return random_dictatorship(inst, order)


def _tie_free(m):
    return all(len(set(row)) == len(row) for row in m.values)


def _rp_tie_free(m):
    """Sum of utilities over all orders, by recursion on (agents left, items left)"""
    n = m.n_agents
    values = m.values
    weights = [factorial(k) for k in range(n + 1)]
    memo = {}

    def total(agents_left, items_left):
        key = (agents_left, items_left)
        if key in memo:
            return memo[key]
        acc = [ZERO] * n
        if agents_left:
            k = bin(agents_left).count('1')
            for a in range(n):
                if not agents_left >> a & 1:
                    continue
                row = values[a]
                best = max((j for j in range(m.n_items) if items_left >> j & 1), key=lambda j: row[j])
                acc[a] += row[best] * weights[k - 1]
                sub = total(agents_left & ~(1 << a), items_left & ~(1 << best))
                for i, s in enumerate(sub):
                    if s:
                        acc[i] += s
        memo[key] = acc
        return acc

    sums = total((1 << n) - 1, (1 << m.n_items) - 1)
    logger.debug(f"RP recursion visited {len(memo)} states")
    return tuple(s / weights[n] for s in sums)


def rp_exact(inst, progress=False):
    """
    Exact Random Priority expected utilities over all n! agent orders.

    Args:
        inst: MatchingInstance (serial item selection) or Instance
            (random serial dictatorship over alternatives)
        progress: show a tqdm bar over the orders

    Returns:
        DisagreementPoint with provenance rp_exact
    """
    n = inst.n_agents
    check_bound(n, settings.RP_EXACT_BOUND, 'rp_exact agents', 'use rp_montecarlo instead')
    if isinstance(inst, MatchingInstance) and _tie_free(inst):
        utilities = _rp_tie_free(inst)
    else:
        sums = [ZERO] * n
        orders = permutations(range(n))
        for order in tqdm(orders, total=factorial(n), disable=not progress, desc='RP orders'):
            for i, u in enumerate(_run_order(inst, order)):
                sums[i] += u
        utilities = tuple(s / factorial(n) for s in sums)
    logger.info(f"rp_exact on {n} agents: {[str(u) for u in utilities]}")
    return DisagreementPoint(utilities, Provenance(RP_EXACT))


def sample_orders(n, samples, seed, block_size=None, progress=False):
    """
    Count the agent orders drawn by seeded sampling.

    Block b is drawn from its own generator seeded with (seed, b), so every
    block can be reproduced independently of the others.
    """
    block_size = block_size or settings.MC_BLOCK_SIZE
    counts = Counter()
    blocks = range(0, samples, block_size)
    for b, start in enumerate(tqdm(blocks, disable=not progress, desc='RP samples')):
        size = min(block_size, samples - start)
        rng = np.random.default_rng(np.random.SeedSequence([seed, b]))
        orders = rng.permuted(np.tile(np.arange(n), (size, 1)), axis=1)
        rows, freq = np.unique(orders, axis=0, return_counts=True)
        for row, c in zip(rows, freq):
            counts[tuple(int(a) for a in row)] += int(c)
    return counts


def rp_montecarlo(inst, samples=None, seed=None, block_size=None, progress=False):
    """
    Sampled Random Priority: exact mean over `samples` seeded random orders.

    Each distinct order is evaluated once and weighted by its frequency. The
    draw depends on (seed, samples, block_size); all three are recorded in
    the provenance.
    """
    samples = settings.MC_SAMPLES if samples is None else int(samples)
    seed = settings.MC_SEED if seed is None else int(seed)
    block_size = settings.MC_BLOCK_SIZE if block_size is None else int(block_size)
    if block_size < 1:
        raise InstanceError(f"rp_montecarlo needs a positive block size, got {block_size}")
    if samples < 1:
        raise InstanceError(f"rp_montecarlo needs at least one sample, got {samples}")
    n = inst.n_agents
    counts = sample_orders(n, samples, seed, block_size=block_size, progress=progress)
    sums = [ZERO] * n
    for order, c in counts.items():
        for i, u in enumerate(_run_order(inst, order)):
            sums[i] += c * u
    utilities = tuple(s / samples for s in sums)
    logger.info(f"rp_montecarlo: {samples} samples, {len(counts)} distinct orders (seed {seed})")
    provenance = Provenance(RP_MONTECARLO, seed=seed, samples=samples, block_size=block_size)
    return DisagreementPoint(utilities, provenance)


# --- Eating -----------------------------------------------------------------

@dataclass(frozen=True)
class EatingPhase:
    length: Fraction
    consumed: Tuple[str, ...]


@dataclass(frozen=True)
class EatingSchedule:
    """Fractional allocation x[i][j] and the phases that produced it"""
    allocation: Tuple[Tuple[Fraction, ...], ...]
    phases: Tuple[EatingPhase, ...]

    def row_sums(self):
        return tuple(sum(row, ZERO) for row in self.allocation)

    def column_sums(self):
        return tuple(sum(col, ZERO) for col in zip(*self.allocation))

    def is_doubly_stochastic(self):
        if any(x < 0 or x > 1 for row in self.allocation for x in row):
            return False
        return all(s == 1 for s in self.row_sums()) and all(s == 1 for s in self.column_sums())


def eating(m):
    """
    Simultaneous eating at unit speed, in exact arithmetic.

    An agent with k tied favourite remaining items eats each at rate 1/k.
    A phase ends when some item is used up (or when time reaches 1).

    Returns:
        (EatingSchedule, DisagreementPoint)
    """
    if not isinstance(m, MatchingInstance):
        raise IncompatibleOptionsError("Eating needs a matching instance")
    n, n_items = m.n_agents, m.n_items
    capacity = [Fraction(1)] * n_items
    x = [[ZERO] * n_items for _ in range(n)]
    phases = []
    t = ZERO
    while t < 1:
        live = [j for j in range(n_items) if capacity[j] > 0]
        rates = [ZERO] * n_items
        menus = []
        for row in m.values:
            best = max(row[j] for j in live)
            tops = [j for j in live if row[j] == best]
            menus.append(tops)
            for j in tops:
                rates[j] += Fraction(1, len(tops))
        length = min([1 - t] + [capacity[j] / rates[j] for j in live if rates[j]])
        for i, tops in enumerate(menus):
            share = length / len(tops)
            for j in tops:
                x[i][j] += share
        for j in live:
            capacity[j] -= rates[j] * length
        consumed = tuple(m.item_ids[j] for j in live if rates[j] and capacity[j] == 0)
        phases.append(EatingPhase(length, consumed))
        logger.debug(f"Eating phase of length {length}, consumed {list(consumed)}")
        t += length

    allocation = tuple(tuple(row) for row in x)
    utilities = tuple(
        sum((xij * v for xij, v in zip(row, vals)), ZERO) for row, vals in zip(allocation, m.values)
    )
    return EatingSchedule(allocation, tuple(phases)), DisagreementPoint(utilities, Provenance(EATING))


# --- Dispatch ---------------------------------------------------------------

def disagreement_point(inst, mode, utilities=None, alternative=None, samples=None, seed=None, progress=False):
    """
    Compute the disagreement point for a mode name.

    Args:
        inst: Instance or MatchingInstance
        mode: one of MODES
        utilities: explicit utilities (mode 'explicit')
        alternative: alternative index or label (mode 'alternative', general instances)
        samples, seed: Monte-Carlo parameters (mode 'rp-mc')
    """
    if mode == 'uniform':
        return uniform(inst)
    if mode == 'rp':
        return rp_exact(inst, progress=progress)
    if mode == 'rp-mc':
        return rp_montecarlo(inst, samples, seed, progress=progress)
    if mode == 'eating':
        if not isinstance(inst, MatchingInstance):
            raise IncompatibleOptionsError("Disagreement 'eating' needs a matching instance")
        return eating(inst)[1]
    if mode == 'explicit':
        if utilities is None:
            raise IncompatibleOptionsError("Disagreement 'explicit' needs utilities")
        d = DisagreementPoint.explicit(utilities)
        d.check_length(inst.n_agents)
        return d
    if mode == 'alternative':
        if not isinstance(inst, Instance):
            raise IncompatibleOptionsError("Disagreement 'alternative' needs a general instance")
        if isinstance(alternative, str) and alternative in inst.alternative_ids:
            alternative = inst.alternative_ids.index(alternative)
        try:
            index = int(alternative)
        except (TypeError, ValueError) as e:
            raise InstanceError(f"Unknown disagreement alternative {alternative!r}") from e
        if not 0 <= index < inst.n_alternatives:
            raise InstanceError(f"Disagreement alternative index {index} out of range")
        return DisagreementPoint.from_alternative(inst, index)
    raise IncompatibleOptionsError(f"Unknown disagreement mode {mode!r}; expected one of {', '.join(MODES)}")
