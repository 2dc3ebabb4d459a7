"""
WS-core machinery: anticore and domination checks, non-emptiness of the
WS-core through its covering LP, and sufficient conditions for non-emptiness.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from welfareshare import settings
from welfareshare.utils.lp import (
    INFEASIBLE, OPTIMAL, UNBOUNDED,
    Constraint, LinearProgram, LPResult, simplex_solve,
)
from welfareshare.utils.subsets import members, nonempty_subsets
from welfareshare.welfare import check_bound, is_submodular, wpi

logger = logging.getLogger('welfareshare')

__all__ = [
    'OPTIMAL', 'INFEASIBLE', 'UNBOUNDED', 'Constraint', 'LinearProgram', 'LPResult', 'simplex_solve',
    'AnticoreVerdict', 'DominationVerdict', 'CoreVerdict',
    'check_anticore', 'check_domination', 'ws_core_nonempty', 'sufficient_conditions',
    'SUBMODULAR', 'MONOTONE_GAP', 'NEITHER',
]

SUBMODULAR = 'submodular'
MONOTONE_GAP = 'monotone_gap'
NEITHER = 'neither'


@dataclass(frozen=True)
class AnticoreVerdict:
    ok: bool
    subset: Optional[int] = None
    slack: Optional[Fraction] = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class DominationVerdict:
    ok: bool
    agent: Optional[int] = None
    gap: Optional[Fraction] = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class CoreVerdict:
    """nonempty with a witness utility vector, or empty with the LP value gap"""
    nonempty: bool
    witness: Optional[Tuple[Fraction, ...]] = None
    gap: Optional[Fraction] = None

    def __bool__(self):
        return self.nonempty


def subset_sums(values):
    """sums[mask] = sum of values over the agents in mask"""
    sums = [Fraction(0)] * (1 << len(values))
    for mask in range(1, len(sums)):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + values[low.bit_length() - 1]
    return sums


def check_anticore(o, u):
    """
    u(S) <= W_max(S) for every nonempty S.

    Returns the first violated set (smallest cardinality, then lexicographic)
    with its negative slack W_max(S) - u(S).
    """
    check_bound(o.n_agents, settings.ENUMERATION_BOUND, 'check_anticore agents')
    sums = subset_sums([Fraction(x) for x in u])
    for mask in nonempty_subsets(o.n_agents):
        slack = o.wmax(mask) - sums[mask]
        if slack < 0:
            return AnticoreVerdict(False, mask, slack)
    return AnticoreVerdict(True)


def check_domination(u, d):
    """u_i >= d_i for every agent; the first failing agent is reported with gap u_i - d_i"""
    d.check_length(len(u))
    for i, (ui, di) in enumerate(zip(u, d.utilities)):
        if ui < di:
            return DominationVerdict(False, i, Fraction(ui) - di)
    return DominationVerdict(True)


def core_program(o, d, objective=None):
    """
    Covering LP over gains x = u - d >= 0 with x(S) <= W_max(S) - W_pi(S)
    for every nonempty S. The objective defaults to sum(x).
    """
    n = o.n_agents
    objective = objective or (Fraction(1),) * n
    constraints = []
    for mask in nonempty_subsets(n):
        row = tuple(Fraction(1) if mask >> i & 1 else Fraction(0) for i in range(n))
        constraints.append(Constraint(row, '<=', o.wmax(mask) - wpi(d, mask)))
    return LinearProgram(n, tuple(objective), 'max', tuple(constraints))


def ws_core_nonempty(o, d):
    """
    The WS-core is nonempty iff the covering LP reaches f(N) = W_max(N) - W_pi(N).

    The witness is u = x + d for an optimal x.
    """
    n = o.n_agents
    check_bound(n, settings.ENUMERATION_BOUND, 'ws_core_nonempty agents')
    d.check_length(n)
    target = o.wmax(o.full) - wpi(d, o.full)
    result = simplex_solve(core_program(o, d))
    if result.status == INFEASIBLE:
        # d itself breaks an anticore constraint (f(S) < 0 for some S)
        logger.info("WS-core empty: disagreement point lies outside the anticore")
        return CoreVerdict(False, gap=None)
    if result.value != target:
        logger.info(f"WS-core empty: covering value {result.value} < {target}")
        return CoreVerdict(False, gap=target - result.value)
    witness = tuple(x + di for x, di in zip(result.point, d.utilities))
    return CoreVerdict(True, witness=witness)


def sufficient_conditions(o, d):
    """
    Which sufficient condition for a nonempty WS-core holds:
    W_max submodular, or W_max - W_pi monotone, or neither.
    """
    if is_submodular(o):
        return SUBMODULAR
    n = o.n_agents
    full = o.full
    for mask in range(full + 1):
        gap = o.wmax(mask) - wpi(d, mask)
        for i in range(n):
            bit = 1 << i
            if mask & bit:
                continue
            if o.wmax(mask | bit) - wpi(d, mask | bit) < gap:
                logger.debug(f"W_max - W_pi decreases when adding agent {i} to {members(mask)}")
                return NEITHER
    return MONOTONE_GAP
