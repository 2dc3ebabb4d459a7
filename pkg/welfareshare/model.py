"""
Domain types for welfareshare.

Instances are immutable agent x alternative (or agent x item) tables of exact
rationals. Every mechanism returns a Solution, which checks budget balance and
utility consistency when it is built.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import perm
from typing import Optional, Tuple

from welfareshare import settings
from welfareshare.exceptions import EnumerationBoundError, InstanceError

logger = logging.getLogger('welfareshare')

# Provenance tags of a disagreement point
UNIFORM = 'uniform'
RP_EXACT = 'rp_exact'
RP_MONTECARLO = 'rp_montecarlo'
EATING = 'eating'
EXPLICIT = 'explicit'
PROVENANCES = (UNIFORM, RP_EXACT, RP_MONTECARLO, EATING, EXPLICIT)


def _as_matrix(values):
    matrix = tuple(tuple(Fraction(v) for v in row) for row in values)
    if not matrix or not matrix[0]:
        raise InstanceError("Valuation matrix must have at least one row and one column")
    width = len(matrix[0])
    for i, row in enumerate(matrix):
        if len(row) != width:
            raise InstanceError(f"Valuation matrix is not rectangular: row {i} has {len(row)} entries, expected {width}")
    return matrix


def _default_agent_ids(n):
    return tuple(str(i + 1) for i in range(n))


@dataclass(frozen=True)
class Instance:
    """General instance: agents x alternatives valuation table v_i(A)"""
    values: Tuple[Tuple[Fraction, ...], ...]
    alternative_ids: Tuple[str, ...] = ()
    agent_ids: Tuple[str, ...] = ()
    name: str = ''

    def __post_init__(self):
        matrix = _as_matrix(self.values)
        object.__setattr__(self, 'values', matrix)
        alternative_ids = tuple(str(a) for a in self.alternative_ids) or tuple(f"A{k + 1}" for k in range(len(matrix[0])))
        agent_ids = tuple(str(a) for a in self.agent_ids) or _default_agent_ids(len(matrix))
        if len(alternative_ids) != len(matrix[0]):
            raise InstanceError(f"{len(alternative_ids)} alternative labels for {len(matrix[0])} columns")
        if len(agent_ids) != len(matrix):
            raise InstanceError(f"{len(agent_ids)} agent labels for {len(matrix)} rows")
        object.__setattr__(self, 'alternative_ids', alternative_ids)
        object.__setattr__(self, 'agent_ids', agent_ids)

    kind = 'general'

    @property
    def n_agents(self):
        return len(self.values)

    @property
    def n_alternatives(self):
        return len(self.values[0])

    def alternative_values(self, alternative):
        """v_i(A) for every agent i"""
        return tuple(row[alternative] for row in self.values)

    def alternative_label(self, alternative):
        return self.alternative_ids[alternative]

    def welfare(self, alternative, agents=None):
        agents = range(self.n_agents) if agents is None else agents
        return sum((self.values[i][alternative] for i in agents), Fraction(0))

    def restrict_agents(self, agents):
        """Same alternatives, agents restricted (and re-indexed in the given order)"""
        agents = list(agents)
        return Instance(
            tuple(self.values[i] for i in agents),
            self.alternative_ids,
            tuple(self.agent_ids[i] for i in agents),
            name=f"{self.name}|{','.join(self.agent_ids[i] for i in agents)}" if self.name else '',
        )

    def shifted(self, shifts):
        return Instance(
            tuple(tuple(v - s for v in row) for row, s in zip(self.values, shifts)),
            self.alternative_ids, self.agent_ids, self.name,
        )


@dataclass(frozen=True)
class MatchingInstance:
    """
    Unit-demand matching: agents x items valuation table v_i(j).

    Alternatives are the injective assignments of agents to items
    (permutations when square); they are never materialised unless asked.
    """
    values: Tuple[Tuple[Fraction, ...], ...]
    item_ids: Tuple[str, ...] = ()
    agent_ids: Tuple[str, ...] = ()
    rent: Optional[Fraction] = None
    name: str = ''

    def __post_init__(self):
        matrix = _as_matrix(self.values)
        object.__setattr__(self, 'values', matrix)
        if len(matrix[0]) < len(matrix):
            raise InstanceError(f"Matching instance needs n_items >= n_agents, got {len(matrix[0])} < {len(matrix)}")
        item_ids = tuple(str(a) for a in self.item_ids) or tuple(f"item{k + 1}" for k in range(len(matrix[0])))
        agent_ids = tuple(str(a) for a in self.agent_ids) or _default_agent_ids(len(matrix))
        if len(item_ids) != len(matrix[0]):
            raise InstanceError(f"{len(item_ids)} item labels for {len(matrix[0])} columns")
        if len(agent_ids) != len(matrix):
            raise InstanceError(f"{len(agent_ids)} agent labels for {len(matrix)} rows")
        object.__setattr__(self, 'item_ids', item_ids)
        object.__setattr__(self, 'agent_ids', agent_ids)
        if self.rent is not None:
            object.__setattr__(self, 'rent', Fraction(self.rent))

    kind = 'matching'

    @property
    def n_agents(self):
        return len(self.values)

    @property
    def n_items(self):
        return len(self.values[0])

    @property
    def is_square(self):
        return self.n_agents == self.n_items

    @property
    def n_alternatives(self):
        return perm(self.n_items, self.n_agents)

    def alternative_values(self, assignment):
        return tuple(self.values[i][j] for i, j in enumerate(assignment))

    def alternative_label(self, assignment):
        return '(' + ', '.join(f"{self.agent_ids[i]}->{self.item_ids[j]}" for i, j in enumerate(assignment)) + ')'

    def welfare(self, assignment, agents=None):
        agents = range(self.n_agents) if agents is None else agents
        return sum((self.values[i][assignment[i]] for i in agents), Fraction(0))

    def assignments(self):
        """All injective assignments, in lexicographic order of item vectors"""
        return permutations(range(self.n_items), self.n_agents)

    def restrict(self, agents, items=None):
        """Agents (and optionally items) restricted, re-indexed in the given order"""
        agents = list(agents)
        items = list(range(self.n_items)) if items is None else list(items)
        return MatchingInstance(
            tuple(tuple(self.values[i][j] for j in items) for i in agents),
            tuple(self.item_ids[j] for j in items),
            tuple(self.agent_ids[i] for i in agents),
            name=f"{self.name}|{','.join(self.agent_ids[i] for i in agents)}" if self.name else '',
        )

    def restrict_agents(self, agents):
        return self.restrict(agents)

    def shifted(self, shifts):
        return MatchingInstance(
            tuple(tuple(v - s for v in row) for row, s in zip(self.values, shifts)),
            self.item_ids, self.agent_ids, self.rent, self.name,
        )

    def as_instance(self):
        """Materialise the assignments as alternatives of a general Instance"""
        count = self.n_alternatives
        if count > settings.ALTERNATIVE_ENUMERATION_BOUND:
            raise EnumerationBoundError('alternatives of matching instance', count, settings.ALTERNATIVE_ENUMERATION_BOUND)
        assignments = list(self.assignments())
        columns = [self.alternative_values(a) for a in assignments]
        values = tuple(tuple(col[i] for col in columns) for i in range(self.n_agents))
        labels = tuple(self.alternative_label(a) for a in assignments)
        return Instance(values, labels, self.agent_ids, self.name), assignments


@dataclass(frozen=True)
class Provenance:
    kind: str
    seed: Optional[int] = None
    samples: Optional[int] = None
    block_size: Optional[int] = None
    distribution: Optional[Tuple[Fraction, ...]] = None
    note: str = ''

    def __post_init__(self):
        if self.kind not in PROVENANCES:
            raise InstanceError(f"Unknown disagreement provenance {self.kind!r}")

    def describe(self):
        if self.kind == RP_MONTECARLO:
            if self.block_size is not None:
                return f"{self.kind}(seed={self.seed}, samples={self.samples}, block_size={self.block_size})"
            return f"{self.kind}(seed={self.seed}, samples={self.samples})"
        if self.note:
            return f"{self.kind}({self.note})"
        return self.kind


@dataclass(frozen=True)
class DisagreementPoint:
    """Expected utilities of the reference mechanism, one per agent"""
    utilities: Tuple[Fraction, ...]
    provenance: Provenance = field(default_factory=lambda: Provenance(EXPLICIT))

    def __post_init__(self):
        object.__setattr__(self, 'utilities', tuple(Fraction(u) for u in self.utilities))

    def __len__(self):
        return len(self.utilities)

    def __getitem__(self, i):
        return self.utilities[i]

    def check_length(self, n):
        if len(self.utilities) != n:
            raise InstanceError(f"Disagreement point has {len(self.utilities)} entries for {n} agents")

    def restrict(self, agents):
        return DisagreementPoint(tuple(self.utilities[i] for i in agents), self.provenance)

    @classmethod
    def explicit(cls, utilities, note=''):
        return cls(tuple(utilities), Provenance(EXPLICIT, note=note))

    @classmethod
    def zeros(cls, n):
        return cls.explicit((Fraction(0),) * n, note='zero')

    @classmethod
    def from_alternative(cls, inst, alternative):
        """The disagreement alternative is chosen with certainty"""
        return cls(inst.alternative_values(alternative),
                   Provenance(EXPLICIT, note=f"alternative {inst.alternative_label(alternative)}"))

    @classmethod
    def from_distribution(cls, inst, weights):
        """Expected utilities under a fixed distribution over the instance's alternatives"""
        weights = tuple(Fraction(w) for w in weights)
        if len(weights) != inst.n_alternatives:
            raise InstanceError(f"Distribution has {len(weights)} weights for {inst.n_alternatives} alternatives")
        if any(w < 0 for w in weights) or sum(weights) != 1:
            raise InstanceError("Distribution weights must be nonnegative and sum to 1")
        utilities = tuple(
            sum((w * v for w, v in zip(weights, row)), Fraction(0)) for row in inst.values
        )
        return cls(utilities, Provenance(EXPLICIT, distribution=weights, note='distribution'))


@dataclass(frozen=True)
class Solution:
    """
    A welfare-maximising alternative with budget-balanced transfers.

    values[i] = v_i(alternative); utilities[i] = values[i] + transfers[i].
    """
    alternative: object
    values: Tuple[Fraction, ...]
    transfers: Tuple[Fraction, ...]
    utilities: Tuple[Fraction, ...]
    mechanism: str
    alternative_label: str = ''
    notes: Tuple[str, ...] = ()
    # Per-item transfers, for pricing mechanisms on matching instances
    item_transfers: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        for name in ('values', 'transfers', 'utilities'):
            object.__setattr__(self, name, tuple(Fraction(x) for x in getattr(self, name)))
        if not len(self.values) == len(self.transfers) == len(self.utilities):
            raise InstanceError("Solution vectors have different lengths")
        balance = sum(self.transfers, Fraction(0))
        if balance != 0:
            raise InstanceError(f"{self.mechanism}: transfers are not budget balanced (sum {balance})")
        for i, (v, p, u) in enumerate(zip(self.values, self.transfers, self.utilities)):
            if v + p != u:
                raise InstanceError(f"{self.mechanism}: agent {i} utility {u} != value {v} + transfer {p}")

    @property
    def n_agents(self):
        return len(self.utilities)


def build_solution(inst, alternative, utilities, mechanism, notes=(), item_transfers=None):
    """Derive transfers p_i = u_i - v_i(A*) and construct a checked Solution"""
    values = inst.alternative_values(alternative)
    utilities = tuple(Fraction(u) for u in utilities)
    transfers = tuple(u - v for u, v in zip(utilities, values))
    return Solution(alternative, values, transfers, utilities, mechanism,
                    inst.alternative_label(alternative), tuple(notes), item_transfers)


def apply_rent_shift(m):
    """
    Fold the rent into the valuations: v'_i(j) = v_i(j) - rent/n.

    Returns the instance unchanged when no rent is set.
    """
    if m.rent is None:
        return m
    if not m.is_square:
        raise InstanceError(f"Rent shift needs a square instance, got {m.n_agents} agents x {m.n_items} items")
    share = m.rent / m.n_agents
    logger.debug(f"Applying rent shift of {share} per agent")
    return MatchingInstance(
        tuple(tuple(v - share for v in row) for row in m.values),
        m.item_ids, m.agent_ids, None, m.name,
    )


def normalize_to_disagreement(inst, d):
    """Shift each agent's valuation by its disagreement utility so that d becomes 0"""
    d.check_length(inst.n_agents)
    return inst.shifted(d.utilities)
