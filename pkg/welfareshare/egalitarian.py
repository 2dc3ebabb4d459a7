"""
Egalitarian selection from the WS-core.

Water filling computes the lexicographically maximal (lexmax) point when
W_max is submodular. For other instances lexmax_lp fixes agents level by
level with exact LPs. A scipy min-square diagnostic and Lorenz comparison
sit alongside.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from welfareshare import settings
from welfareshare.core import subset_sums, ws_core_nonempty
from welfareshare.exceptions import ConvergenceError, EmptyWSCoreError, InstanceError
from welfareshare.model import build_solution
from welfareshare.utils.lp import AffineItem, Constraint, lexicographic_maxmin
from welfareshare.utils.rational import format_rational
from welfareshare.utils.subsets import label_subset, members, nonempty_subsets, popcount
from welfareshare.welfare import check_bound, is_submodular, wmax_argmax

logger = logging.getLogger('welfareshare')

ZERO = Fraction(0)
MECHANISM = 'lexmax'


@dataclass(frozen=True)
class WaterFillingStep:
    increment: Fraction
    locked: Tuple[int, ...]
    tight_sets: Tuple[int, ...]


@dataclass(frozen=True)
class WaterFillingTrace:
    iterations: Tuple[WaterFillingStep, ...]
    utilities: Tuple[Fraction, ...]
    exhausted: bool

    def tight_sets(self):
        return [s for step in self.iterations for s in step.tight_sets]

    def to_dict(self, agent_ids=None):
        agent_ids = agent_ids or [str(i + 1) for i in range(len(self.utilities))]
        return {
            'iterations': [
                {
                    'increment': format_rational(step.increment),
                    'locked': [agent_ids[i] for i in step.locked],
                    'tight_sets': [label_subset(s, agent_ids) for s in step.tight_sets],
                }
                for step in self.iterations
            ],
            'utilities': [format_rational(u) for u in self.utilities],
            'exhausted': self.exhausted,
        }


def water_filling(o, d):
    """
    Raise all free agents uniformly from d until anticore constraints lock them.

    Each round the increment is the minimum over subsets S meeting the free
    agents of (W_max(S) - u(S)) / |S & Free|; the minimising sets are tight
    and their free agents are locked.

    Returns:
        (Solution or None, WaterFillingTrace); the Solution is None when the
        welfare W_max(N) was not exhausted (or the oracle has no instance)

    Raises:
        EmptyWSCoreError: d itself violates an anticore constraint
    """
    n = o.n_agents
    check_bound(n, settings.ENUMERATION_BOUND, 'water_filling agents')
    d.check_length(n)
    u = list(d.utilities)
    free = o.full
    steps = []
    while free:
        sums = subset_sums(u)
        best = None
        tight = []
        for mask in range(1, o.full + 1):
            k = popcount(mask & free)
            if not k:
                continue
            ratio = (o.wmax(mask) - sums[mask]) / k
            if best is None or ratio < best:
                best, tight = ratio, [mask]
            elif ratio == best:
                tight.append(mask)
        if best < 0:
            raise EmptyWSCoreError(
                f"Disagreement point exceeds W_max on {members(tight[0])} by {-best * popcount(tight[0] & free)}"
            )
        for i in members(free):
            u[i] += best
        locked = 0
        for mask in tight:
            locked |= mask
        locked &= free
        free &= ~locked
        steps.append(WaterFillingStep(best, tuple(members(locked)), tuple(tight)))
        logger.debug(f"Water filling: increment {best}, locked {members(locked)}")

    exhausted = sum(u, ZERO) == o.wmax(o.full)
    trace = WaterFillingTrace(tuple(steps), tuple(u), exhausted)
    if not exhausted:
        logger.info(f"Water filling halted at {[str(x) for x in u]} before exhausting W_max(N)")
        return None, trace
    if o.instance is None:
        return None, trace
    solution = build_solution(o.instance, wmax_argmax(o), u, MECHANISM, ('water filling',))
    logger.info(f"Water filling finished in {len(steps)} rounds")
    return solution, trace


def core_constraints(o, d):
    """Gains x = u - d >= 0: x(S) <= W_max(S) - d(S), with equality on N"""
    n = o.n_agents
    constraints = []
    for mask in nonempty_subsets(n):
        row = tuple(Fraction(1) if mask >> i & 1 else ZERO for i in range(n))
        rhs = o.wmax(mask) - sum((d.utilities[i] for i in members(mask)), ZERO)
        constraints.append(Constraint(row, '=' if mask == o.full else '<=', rhs))
    return constraints


def lexmax_vector(o, d):
    """
    Lexmax point of the WS-core by iterative exact LPs.

    Returns:
        (utilities, levels) with levels the LexLevel log of the max-min rounds
    """
    n = o.n_agents
    check_bound(n, settings.ENUMERATION_BOUND, 'lexmax_lp agents')
    if not ws_core_nonempty(o, d):
        raise EmptyWSCoreError("The WS-core is empty; there is no lexmax point")
    items = [
        AffineItem(tuple(Fraction(1) if k == i else ZERO for k in range(n)), d.utilities[i])
        for i in range(n)
    ]
    point, levels = lexicographic_maxmin(n, core_constraints(o, d), items)
    utilities = tuple(x + di for x, di in zip(point, d.utilities))
    return utilities, levels


def lexmax_lp(o, d):
    """Lexmax Solution computed with LPs (valid without submodularity)"""
    utilities, levels = lexmax_vector(o, d)
    notes = tuple(f"level {format_rational(lv.level)}: agents {list(lv.fixed)}" for lv in levels)
    return build_solution(o.instance, wmax_argmax(o), utilities, MECHANISM, notes)


@dataclass
class LexmaxResult:
    solution: object
    method: str
    trace: Optional[WaterFillingTrace] = None
    levels: List = field(default_factory=list)


def lexmax(o, d):
    """
    Lexmax with the algorithm the instance allows: water filling when W_max is
    submodular and the run exhausts W_max(N), LPs otherwise.
    """
    submodular = bool(is_submodular(o))
    solution, trace = water_filling(o, d)
    if submodular and solution is not None:
        return LexmaxResult(solution, 'water_filling', trace)
    logger.info("Routing lexmax to the LP solver")
    utilities, levels = lexmax_vector(o, d)
    solution = build_solution(o.instance, wmax_argmax(o), utilities, MECHANISM, ('lexicographic LP',))
    return LexmaxResult(solution, 'lexmax_lp', trace, levels)


def reconstruct_from_tight_sets(trace, o, d):
    """
    Rebuild water-filling utilities from the recorded tight sets alone.

    The union of tight sets found up to each round is itself tight, and the
    agents it adds share the residual gain equally.
    """
    u = list(d.utilities)
    covered = 0
    for step in trace.iterations:
        union = covered
        for mask in step.tight_sets:
            union |= mask
        new = members(union & ~covered)
        if not new:
            continue
        residual = o.wmax(union) - sum((u[i] for i in members(covered)), ZERO)
        level = (residual - sum((d.utilities[i] for i in new), ZERO)) / len(new)
        for i in new:
            u[i] = d.utilities[i] + level
        covered = union
    return tuple(u)


def sum_squares(u):
    return sum((Fraction(x) ** 2 for x in u), ZERO)


U_DOMINATES = 'u_dominates'
W_DOMINATES = 'w_dominates'
INCOMPARABLE = 'incomparable'
EQUAL = 'equal'


def lorenz_compare(u, w):
    """Compare prefix sums of the ascending-sorted vectors (equal totals required)"""
    u = sorted(Fraction(x) for x in u)
    w = sorted(Fraction(x) for x in w)
    if len(u) != len(w) or sum(u, ZERO) != sum(w, ZERO):
        raise InstanceError("Lorenz comparison needs vectors of equal length and equal sum")
    su = sw = ZERO
    u_ahead = w_ahead = False
    for a, b in zip(u, w):
        su += a
        sw += b
        if su > sw:
            u_ahead = True
        elif sw > su:
            w_ahead = True
    if u_ahead and w_ahead:
        return INCOMPARABLE
    if u_ahead:
        return U_DOMINATES
    if w_ahead:
        return W_DOMINATES
    return EQUAL


def min_square_diag(o, d, tol=None):
    """
    Floating-point min-square point of the WS-core (SLSQP), for diagnostics only.

    Returns:
        numpy array of utilities

    Raises:
        EmptyWSCoreError, ConvergenceError
    """
    tol = settings.MIN_SQUARE_TOL if tol is None else tol
    n = o.n_agents
    verdict = ws_core_nonempty(o, d)
    if not verdict:
        raise EmptyWSCoreError("The WS-core is empty; no min-square point")
    if n == 1:
        return np.array([float(o.wmax(o.full))])

    masks = [m for m in nonempty_subsets(n) if m != o.full]
    incidence = np.array([[1.0 if m >> i & 1 else 0.0 for i in range(n)] for m in masks])
    caps = np.array([float(o.wmax(m)) for m in masks])
    total = float(o.wmax(o.full))
    lower = [float(x) for x in d.utilities]

    result = minimize(
        lambda u: float(np.dot(u, u)),
        np.array([float(x) for x in verdict.witness]),
        jac=lambda u: 2 * u,
        method='SLSQP',
        bounds=[(lo, None) for lo in lower],
        constraints=[
            {'type': 'ineq', 'fun': lambda u: caps - incidence @ u, 'jac': lambda u: -incidence},
            {'type': 'eq', 'fun': lambda u: np.array([u.sum() - total]), 'jac': lambda u: np.ones((1, n))},
        ],
        options={'ftol': tol, 'maxiter': settings.MIN_SQUARE_MAX_ITER},
    )
    if not result.success:
        raise ConvergenceError(f"Min-square diagnostic did not converge: {result.message}")
    logger.debug(f"Min-square diagnostic converged in {result.nit} iterations")
    return result.x
