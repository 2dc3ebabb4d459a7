"""
Set-function layer: W_max, its dual D and W_pi over agent subsets.

Subsets are bitmasks (bit i = agent i). Oracles memoise W_max per mask.
"""

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from welfareshare import settings
from welfareshare.exceptions import EnumerationBoundError, IncompatibleOptionsError, InstanceError
from welfareshare.model import Instance, MatchingInstance
from welfareshare.utils.matching import lexmin_optimal_assignment, max_weight_assignment
from welfareshare.utils.subsets import full_mask, members, to_mask

logger = logging.getLogger('welfareshare')

GENERAL = 'general'
MATCHING = 'matching'
EXPLICIT = 'explicit'


class SetFunctionOracle:
    """
    W_max oracle backed by a general instance, a matching instance or an
    explicit table of 2^n values indexed by bitmask.

    Evaluation is pure; the memo is shared between threads behind a lock.
    """

    def __init__(self, backing, table=None, n_agents=None):
        if isinstance(backing, MatchingInstance):
            self.kind = MATCHING
            self.instance = backing
            self.n_agents = backing.n_agents
        elif isinstance(backing, Instance):
            self.kind = GENERAL
            self.instance = backing
            self.n_agents = backing.n_agents
            # Columns per alternative, for fast subset sums
            self._columns = tuple(zip(*backing.values))
        elif backing == EXPLICIT:
            self.kind = EXPLICIT
            self.instance = None
            self.n_agents = n_agents
            table = tuple(Fraction(v) for v in table)
            if len(table) != 1 << n_agents:
                raise InstanceError(f"Explicit table has {len(table)} entries, expected {1 << n_agents}")
            if table[0] != 0:
                raise InstanceError("Explicit table must have W_max(empty set) = 0")
            self._table = table
        else:
            raise InstanceError(f"Unsupported oracle backing {backing!r}")
        self.full = full_mask(self.n_agents)
        self._memo = {0: Fraction(0)}
        self._lock = threading.Lock()

    @classmethod
    def from_table(cls, n_agents, table):
        """Explicit set function; table[mask] = f(mask)"""
        return cls(EXPLICIT, table=table, n_agents=n_agents)

    def __repr__(self):
        name = getattr(self.instance, 'name', '') if self.instance is not None else ''
        return f"SetFunctionOracle({self.kind}, n={self.n_agents}{', ' + name if name else ''})"

    def wmax(self, subset):
        mask = to_mask(subset)
        with self._lock:
            cached = self._memo.get(mask)
        if cached is not None:
            return cached
        value = self._evaluate(mask)
        with self._lock:
            self._memo[mask] = value
        return value

    def _evaluate(self, mask):
        if self.kind == EXPLICIT:
            return self._table[mask]
        agents = members(mask)
        if self.kind == GENERAL:
            return max(sum((col[i] for i in agents), Fraction(0)) for col in self._columns)
        rows = [self.instance.values[i] for i in agents]
        value, _ = max_weight_assignment(rows)
        return value

    def argmax(self, subset):
        """
        A welfare-maximising alternative for the subset.

        General: lowest alternative index. Matching: lexicographically smallest
        item vector for the agents of the subset (in agent order); for the full
        agent set this is a complete assignment.
        """
        mask = to_mask(subset)
        if self.kind == EXPLICIT:
            raise IncompatibleOptionsError("An explicit set function has no alternatives")
        agents = members(mask)
        if self.kind == GENERAL:
            best = self.wmax(mask)
            for k, col in enumerate(self._columns):
                if sum((col[i] for i in agents), Fraction(0)) == best:
                    return k
        rows = [self.instance.values[i] for i in agents]
        _, assignment = lexmin_optimal_assignment(rows)
        return assignment


def oracle_for(inst):
    return SetFunctionOracle(inst)


def wmax(o, subset):
    """W_max(S); the empty set has value 0"""
    return o.wmax(subset)


def wmax_argmax(o, subset=None):
    """Witness alternative for wmax; defaults to the full agent set"""
    return o.argmax(o.full if subset is None else subset)


def dual(o, subset):
    """D(S) = W_max(N) - W_max(N \\ S)"""
    mask = to_mask(subset)
    return o.wmax(o.full) - o.wmax(o.full & ~mask)


def wpi(d, subset):
    """Sum of disagreement utilities over the subset"""
    mask = to_mask(subset)
    return sum((d.utilities[i] for i in members(mask)), Fraction(0))


def check_bound(n, bound, what, hint=None):
    if n > bound:
        raise EnumerationBoundError(what, n, bound, hint)


@dataclass(frozen=True)
class SubmodularityVerdict:
    """holds, or a violating pair (S, T) with f(S) + f(T) < f(S & T) + f(S | T)"""
    holds: bool
    witness: Optional[Tuple[int, int]] = None

    def __bool__(self):
        return self.holds


def is_submodular(o, f=None):
    """
    Exhaustive submodularity check of W_max (or of f(mask) when given).

    Uses the marginal form: for agents i != j and S avoiding both,
    f(S+i) - f(S) >= f(S+i+j) - f(S+j). A violation is reported as the
    set pair (S+i, S+j).
    """
    n = o.n_agents
    check_bound(n, settings.ENUMERATION_BOUND, 'is_submodular agents')
    f = o.wmax if f is None else f
    full = o.full
    for i in range(n):
        bi = 1 << i
        for j in range(i + 1, n):
            bj = 1 << j
            pair = bi | bj
            for s in range(full + 1):
                if s & pair:
                    continue
                if f(s | bi) - f(s) < f(s | pair) - f(s | bj):
                    logger.debug(f"Submodularity violated at S={members(s | bi)}, T={members(s | bj)}")
                    return SubmodularityVerdict(False, (s | bi, s | bj))
    return SubmodularityVerdict(True)
