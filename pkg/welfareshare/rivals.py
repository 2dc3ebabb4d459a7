"""
Comparison mechanisms: Shapley value, max-min envy-free pricing,
Kalai-Smorodinsky, Nash (egalitarian surplus split) and nucleolus-WS.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Dict, List, Optional, Tuple

from welfareshare import settings
from welfareshare.core import ws_core_nonempty
from welfareshare.exceptions import EmptyWSCoreError, IncompatibleOptionsError
from welfareshare.model import MatchingInstance, build_solution
from welfareshare.utils.lp import AffineItem, Constraint, lexicographic_maxmin
from welfareshare.utils.subsets import nonempty_subsets, popcount
from welfareshare.welfare import SetFunctionOracle, check_bound, dual, wmax_argmax, wpi

logger = logging.getLogger('welfareshare')

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class MechanismRow:
    mechanism: str
    solution: Optional[object] = None
    flags: Dict[str, Optional[bool]] = field(default_factory=dict)
    error: str = ''


@dataclass
class MechanismReport:
    """One row per mechanism; flags are filled by the core and decompose checks"""
    rows: List[MechanismRow]
    disagreement: Tuple[Fraction, ...]
    agent_ids: Tuple[str, ...]

    def row(self, mechanism):
        return next(r for r in self.rows if r.mechanism == mechanism)


# --- Shapley ----------------------------------------------------------------

def shapley_values(o):
    """Subset-weighted marginal contributions: sum over S of |S|!(n-1-|S|)!/n! (W(S+i) - W(S))"""
    n = o.n_agents
    check_bound(n, settings.ENUMERATION_BOUND, 'shapley agents')
    weights = [Fraction(factorial(k) * factorial(n - 1 - k), factorial(n)) for k in range(n)]
    phi = [ZERO] * n
    for mask in range(o.full + 1):
        base = o.wmax(mask)
        k = popcount(mask)
        for i in range(n):
            bit = 1 << i
            if not mask & bit:
                phi[i] += weights[k] * (o.wmax(mask | bit) - base)
    return tuple(phi)


def shapley_permutations(o):
    """Average marginal contribution over all n! orders"""
    n = o.n_agents
    check_bound(n, settings.SHAPLEY_PERMUTATION_BOUND, 'shapley permutation agents')
    phi = [ZERO] * n
    for order in permutations(range(n)):
        mask = 0
        for i in order:
            phi[i] += o.wmax(mask | 1 << i) - o.wmax(mask)
            mask |= 1 << i
    return tuple(p / factorial(n) for p in phi)


def shapley(o):
    phi = shapley_values(o)
    logger.info(f"Shapley value: {[str(p) for p in phi]}")
    return build_solution(o.instance, wmax_argmax(o), phi, 'shapley')


# --- Envy-free --------------------------------------------------------------

def ef_maxmin(m):
    """
    Envy-free item transfers q (sum 0) for the welfare-maximising assignment,
    chosen by lexicographic max-min of the agents' utilities.
    """
    if not isinstance(m, MatchingInstance) or not m.is_square:
        raise IncompatibleOptionsError("ef-maxmin needs a square matching instance")
    n = m.n_agents
    sigma = SetFunctionOracle(m).argmax((1 << n) - 1)

    constraints = [Constraint((ONE,) * n, '=', ZERO)]
    for i in range(n):
        own = sigma[i]
        for j in range(n):
            if j == own:
                continue
            row = [ZERO] * n
            row[own] += 1
            row[j] -= 1
            # v_i(own) + q_own >= v_i(j) + q_j
            constraints.append(Constraint(tuple(row), '>=', m.values[i][j] - m.values[i][own]))
    items = [
        AffineItem(tuple(ONE if k == sigma[i] else ZERO for k in range(n)), m.values[i][sigma[i]])
        for i in range(n)
    ]
    q, levels = lexicographic_maxmin(n, constraints, items, free=frozenset(range(n)))
    utilities = tuple(item.evaluate(q) for item in items)
    logger.info(f"Envy-free transfers per item: {[str(x) for x in q]} ({len(levels)} levels)")
    return build_solution(m, sigma, utilities, 'ef-maxmin',
                          ('lexicographic max-min selection',), item_transfers=tuple(q))


# --- Bargaining -------------------------------------------------------------

def ks_bargaining(o, d):
    """
    Kalai-Smorodinsky: u = d + t (b - d) with b_i = W_max({i}) and t chosen so
    that sum(u) = W_max(N).

    When sum(b) = sum(d) there is no direction towards the ideal point. The
    surplus W_max(N) - sum(d) is then split equally, so the result stays
    budget balanced; it equals d only when that surplus is zero.
    """
    n = o.n_agents
    d.check_length(n)
    best = [o.wmax(1 << i) for i in range(n)]
    total = o.wmax(o.full)
    sd = sum(d.utilities, ZERO)
    sb = sum(best, ZERO)
    notes = ()
    if sb == sd:
        if total == sd:
            utilities = d.utilities
        else:
            utilities = tuple(di + (total - sd) / n for di in d.utilities)
        notes = ('degenerate ideal point',)
    else:
        t = (total - sd) / (sb - sd)
        utilities = tuple(di + t * (bi - di) for di, bi in zip(d.utilities, best))
    return build_solution(o.instance, wmax_argmax(o), utilities, 'ks', notes)


def nash_bargaining(o, d):
    """With transferable utility the Nash point splits the surplus equally"""
    n = o.n_agents
    d.check_length(n)
    surplus = o.wmax(o.full) - sum(d.utilities, ZERO)
    utilities = tuple(di + surplus / n for di in d.utilities)
    return build_solution(o.instance, wmax_argmax(o), utilities, 'nash')


# --- Nucleolus --------------------------------------------------------------

def nucleolus_ws(o, d):
    """
    Lexicographically maximise the sorted excesses u(S) - g(S) over nonempty
    S != N, where g(S) = max(D(S), d(S)), subject to sum(u) = W_max(N).
    """
    n = o.n_agents
    check_bound(n, settings.ENUMERATION_BOUND, 'nucleolus_ws agents')
    d.check_length(n)
    if not ws_core_nonempty(o, d):
        raise EmptyWSCoreError("The WS-core is empty; nucleolus-WS is undefined")
    total = o.wmax(o.full)
    if n == 1:
        return build_solution(o.instance, wmax_argmax(o), (total,), 'nucleolus-ws')

    constraints = [Constraint((ONE,) * n, '=', total)]
    items = []
    for mask in nonempty_subsets(n):
        if mask == o.full:
            continue
        g = max(dual(o, mask), wpi(d, mask))
        items.append(AffineItem(tuple(ONE if mask >> i & 1 else ZERO for i in range(n)), -g))
    point, levels = lexicographic_maxmin(n, constraints, items, free=frozenset(range(n)))
    if levels and levels[0].level < 0:
        raise EmptyWSCoreError(f"Minimum excess {levels[0].level} is negative")
    logger.info(f"Nucleolus-WS settled in {len(levels)} levels")
    notes = tuple(f"excess level {lv.level}: {len(lv.fixed)} sets" for lv in levels)
    return build_solution(o.instance, wmax_argmax(o), point, 'nucleolus-ws', notes)


def reasonable_from_above(o, u):
    """u_i <= W_max({i}) for every agent"""
    return all(ui <= o.wmax(1 << i) for i, ui in enumerate(u))


__all__ = [
    'MechanismRow', 'MechanismReport', 'shapley_values', 'shapley_permutations', 'shapley',
    'ef_maxmin', 'ks_bargaining', 'nash_bargaining', 'nucleolus_ws', 'reasonable_from_above',
]
