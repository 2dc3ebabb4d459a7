"""
Exact rational linear programming.

A dense two-phase tableau simplex over fractions.Fraction with Bland's
anti-cycling rule, plus an iterative lexicographic max-min routine built on
top of it (used by lexmax_lp, the envy-free selection rule and the nucleolus).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from welfareshare.exceptions import WelfareShareError

logger = logging.getLogger('welfareshare')

ZERO = Fraction(0)
ONE = Fraction(1)

RELATIONS = ('<=', '=', '>=')

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
UNBOUNDED = 'unbounded'


@dataclass(frozen=True)
class Constraint:
    row: Tuple[Fraction, ...]
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"Unknown relation {self.relation!r}")
        object.__setattr__(self, 'row', tuple(Fraction(a) for a in self.row))
        object.__setattr__(self, 'rhs', Fraction(self.rhs))


@dataclass(frozen=True)
class LinearProgram:
    """
    Optimise objective . x subject to constraints.

    Variables are nonnegative unless listed in `free`.
    """
    variables: int
    objective: Tuple[Fraction, ...]
    sense: str = 'max'
    constraints: Tuple[Constraint, ...] = ()
    free: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.sense not in ('max', 'min'):
            raise ValueError(f"Unknown sense {self.sense!r}")
        objective = tuple(Fraction(c) for c in self.objective)
        if len(objective) != self.variables:
            raise ValueError(f"Objective has {len(objective)} coefficients, expected {self.variables}")
        constraints = tuple(self.constraints)
        for c in constraints:
            if len(c.row) != self.variables:
                raise ValueError(f"Constraint row has length {len(c.row)}, expected {self.variables}")
        object.__setattr__(self, 'objective', objective)
        object.__setattr__(self, 'constraints', constraints)
        object.__setattr__(self, 'free', frozenset(self.free))


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Optional[Fraction] = None
    point: Optional[Tuple[Fraction, ...]] = None
    pivots: int = 0

    @property
    def optimal(self):
        return self.status == OPTIMAL


class _Tableau:
    """Rows are lists of Fractions with the right-hand side in the last slot"""

    def __init__(self, rows, basis, n_cols):
        self.rows = rows
        self.basis = basis
        self.n_cols = n_cols
        self.obj = None
        self.pivots = 0

    def set_objective(self, cost):
        # obj[j] = c_B B^-1 A_j - c_j ; obj[-1] = current objective value
        obj = [-c for c in cost] + [ZERO]
        for r, row in enumerate(self.rows):
            cb = cost[self.basis[r]]
            if cb:
                for j, a in enumerate(row):
                    if a:
                        obj[j] += cb * a
        self.obj = obj

    def pivot(self, r, j):
        prow = self.rows[r]
        inv = ONE / prow[j]
        prow = [a * inv for a in prow]
        self.rows[r] = prow
        nz = [(k, a) for k, a in enumerate(prow) if a]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[j]
            if f:
                for k, a in nz:
                    row[k] -= f * a
        f = self.obj[j]
        if f:
            for k, a in nz:
                self.obj[k] -= f * a
        self.basis[r] = j
        self.pivots += 1

    def run(self, allowed):
        """Bland's rule iterations; returns OPTIMAL or UNBOUNDED"""
        while True:
            entering = None
            for j in allowed:
                if self.obj[j] < 0:
                    entering = j
                    break
            if entering is None:
                return OPTIMAL
            leaving = None
            best = None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (ratio == best and self.basis[r] < self.basis[leaving]):
                        best = ratio
                        leaving = r
            if leaving is None:
                return UNBOUNDED
            self.pivot(leaving, entering)


def simplex_solve(lp):
    """
    Solve a LinearProgram exactly.

    Returns:
        LPResult with status optimal (value, point), infeasible or unbounded
    """
    # Column layout: one column per nonnegative variable, two per free variable
    columns = []
    for j in range(lp.variables):
        columns.append((j, ONE))
        if j in lp.free:
            columns.append((j, -ONE))
    n_struct = len(columns)

    prepared = []
    for c in lp.constraints:
        coeffs = [c.row[j] * sign for j, sign in columns]
        rhs = c.rhs
        relation = c.relation
        if rhs < 0:
            coeffs = [-a for a in coeffs]
            rhs = -rhs
            relation = {'<=': '>=', '>=': '<=', '=': '='}[relation]
        prepared.append((coeffs, relation, rhs))

    n_slack = sum(1 for _, rel, _ in prepared if rel != '=')
    n_art = sum(1 for _, rel, _ in prepared if rel != '<=')
    n_cols = n_struct + n_slack + n_art
    art_start = n_struct + n_slack

    rows = []
    basis = []
    slack_col = n_struct
    art_col = art_start
    for coeffs, relation, rhs in prepared:
        row = coeffs + [ZERO] * (n_slack + n_art) + [rhs]
        if relation == '<=':
            row[slack_col] = ONE
            basis.append(slack_col)
            slack_col += 1
        else:
            if relation == '>=':
                row[slack_col] = -ONE
                slack_col += 1
            row[art_col] = ONE
            basis.append(art_col)
            art_col += 1
        rows.append(row)

    tableau = _Tableau(rows, basis, n_cols)

    if n_art:
        cost = [ZERO] * art_start + [-ONE] * n_art
        tableau.set_objective(cost)
        tableau.run(range(n_cols))
        if tableau.obj[-1] < 0:
            logger.debug(f"LP infeasible after phase 1 ({tableau.pivots} pivots)")
            return LPResult(INFEASIBLE, pivots=tableau.pivots)
        # Drive zero-level artificials out of the basis; drop redundant rows
        r = 0
        while r < len(tableau.rows):
            if tableau.basis[r] >= art_start:
                row = tableau.rows[r]
                target = next((j for j in range(art_start) if row[j] != 0), None)
                if target is None:
                    del tableau.rows[r]
                    del tableau.basis[r]
                    continue
                tableau.pivot(r, target)
            r += 1

    sign = ONE if lp.sense == 'max' else -ONE
    cost = [sign * lp.objective[j] * s for j, s in columns] + [ZERO] * (n_slack + n_art)
    tableau.set_objective(cost)
    status = tableau.run(range(art_start))
    if status == UNBOUNDED:
        logger.debug(f"LP unbounded ({tableau.pivots} pivots)")
        return LPResult(UNBOUNDED, pivots=tableau.pivots)

    values = [ZERO] * n_cols
    for r, b in enumerate(tableau.basis):
        values[b] = tableau.rows[r][-1]
    point = [ZERO] * lp.variables
    for col, (j, s) in enumerate(columns):
        point[j] += s * values[col]
    value = sum((c * x for c, x in zip(lp.objective, point)), ZERO)
    return LPResult(OPTIMAL, value, tuple(point), tableau.pivots)


def matrix_rank(rows):
    """Rank of a list of Fraction rows by Gaussian elimination"""
    work = [list(r) for r in rows if any(r)]
    rank = 0
    if not work:
        return 0
    n_cols = len(work[0])
    for col in range(n_cols):
        pivot = next((i for i in range(rank, len(work)) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        p = work[rank]
        for i in range(rank + 1, len(work)):
            f = work[i][col] / p[col]
            if f:
                work[i] = [a - f * b for a, b in zip(work[i], p)]
        rank += 1
        if rank == len(work):
            break
    return rank


@dataclass(frozen=True)
class AffineItem:
    """An expression coeffs . x + const whose value is to be lexicographically maximised"""
    coeffs: Tuple[Fraction, ...]
    const: Fraction = ZERO

    def evaluate(self, point):
        return sum((a * x for a, x in zip(self.coeffs, point) if a), ZERO) + self.const


@dataclass
class LexLevel:
    level: Fraction
    fixed: Tuple[int, ...]


def lexicographic_maxmin(variables, constraints, items, free=frozenset()):
    """
    Lexicographically maximise the sorted vector of affine items over a polytope.

    Repeatedly maximise the minimum level t over unfixed items; an item is
    fixed at t* when maximising that item alone cannot lift it above t* while
    every other unfixed item stays at or above t*.

    Args:
        variables: number of decision variables
        constraints: base Constraint list (the feasible polytope)
        items: list of AffineItem
        free: indices of unrestricted decision variables

    Returns:
        (point, levels) where levels is a list of LexLevel
    """
    constraints = list(constraints)
    items = list(items)
    fixed = {}
    levels = []
    point = None
    t_index = variables
    equality_rows = [list(c.row) for c in constraints if c.relation == '=']

    widened = [Constraint(c.row + (ZERO,), c.relation, c.rhs) for c in constraints]

    while len(fixed) < len(items):
        rows = list(widened)
        for k, item in enumerate(items):
            if k in fixed:
                rows.append(Constraint(tuple(item.coeffs) + (ZERO,), '=', fixed[k] - item.const))
            else:
                rows.append(Constraint(tuple(item.coeffs) + (-ONE,), '>=', -item.const))
        objective = (ZERO,) * variables + (ONE,)
        lp = LinearProgram(variables + 1, objective, 'max', tuple(rows), frozenset(free) | {t_index})
        result = simplex_solve(lp)
        if not result.optimal:
            raise WelfareShareError(f"Lexicographic max-min level LP is {result.status}")
        level = result.value
        point = result.point[:variables]

        candidates = [k for k, item in enumerate(items) if k not in fixed and item.evaluate(point) == level]
        floor_rows = list(constraints)
        for k, item in enumerate(items):
            if k in fixed:
                floor_rows.append(Constraint(item.coeffs, '=', fixed[k] - item.const))
            else:
                floor_rows.append(Constraint(item.coeffs, '>=', level - item.const))

        newly = []
        pending = list(candidates)
        while pending:
            k = pending.pop(0)
            raise_lp = LinearProgram(variables, items[k].coeffs, 'max', tuple(floor_rows), frozenset(free))
            res = simplex_solve(raise_lp)
            if res.optimal and res.value + items[k].const == level:
                newly.append(k)
                continue
            if res.optimal:
                # That optimum lifts other candidates too; they are not blocked
                pending = [q for q in pending if items[q].evaluate(res.point) == level]
        if not newly:
            raise WelfareShareError("Lexicographic max-min made no progress; polytope is degenerate")

        for k in newly:
            fixed[k] = level
        levels.append(LexLevel(level, tuple(newly)))
        logger.debug(f"Lex max-min level {level}: fixed items {newly}")

        rank_rows = equality_rows + [list(items[k].coeffs) for k in fixed]
        if matrix_rank(rank_rows) >= variables:
            # The point is pinned down; remaining items take their values there
            break

    return point, levels
