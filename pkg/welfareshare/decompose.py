"""
Independent components and decomposability verdicts.

A component is an agent set S whose Pareto-optimal choices never conflict
with those of the complement. For matching instances components come with
item sets of the same size.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Optional, Tuple

import networkx as nx

from welfareshare import settings
from welfareshare.exceptions import IncompatibleOptionsError, InstanceError
from welfareshare.mechanisms import get_mechanism, run_mechanism
from welfareshare.disagreement import disagreement_point
from welfareshare.model import MatchingInstance
from welfareshare.utils.subsets import members, nonempty_subsets, to_mask
from welfareshare.welfare import check_bound

logger = logging.getLogger('welfareshare')

EXACT = 'exact'
SUFFICIENT = 'sufficient'
USER_SUPPLIED = 'user_supplied_verified'


@dataclass(frozen=True)
class Block:
    agents: Tuple[int, ...]
    items: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class ComponentPartition:
    blocks: Tuple[Block, ...]
    certificate: str

    def __post_init__(self):
        seen = [a for b in self.blocks for a in b.agents]
        if len(seen) != len(set(seen)):
            raise InstanceError("Component blocks overlap")
        for b in self.blocks:
            if b.items is not None and len(b.items) != len(b.agents):
                raise InstanceError(f"Block {b.agents} has {len(b.items)} items")

    @property
    def trivial(self):
        return len(self.blocks) == 1

    def agent_sets(self):
        return [frozenset(b.agents) for b in self.blocks]

    def to_dict(self, inst):
        out = []
        for b in self.blocks:
            entry = {'agents': [inst.agent_ids[i] for i in b.agents]}
            if b.items is not None:
                entry['items'] = [inst.item_ids[j] for j in b.items]
            out.append(entry)
        return {'blocks': out, 'certificate': self.certificate}


def _ordered(blocks):
    return tuple(sorted(blocks, key=lambda b: min(b.agents)))


# --- Matching components ----------------------------------------------------

def is_pareto_optimal(m, assignment):
    """
    No other complete assignment makes every agent weakly and some agent
    strictly better off.

    Any improvement is a product of item rotations, so it is enough to look
    for a cycle of weakly improving swaps containing a strict one.
    """
    n = m.n_agents
    values = m.values
    own = [values[a][assignment[a]] for a in range(n)]
    reach = [0] * n
    strict = []
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            gain = values[a][assignment[b]] - own[a]
            if gain >= 0:
                reach[a] |= 1 << b
                if gain > 0:
                    strict.append((a, b))
    if not strict:
        return True
    for k in range(n):
        bit = 1 << k
        for a in range(n):
            if reach[a] & bit:
                reach[a] |= reach[k]
    return not any(reach[b] >> a & 1 for a, b in strict)


def pareto_assignment_graph(m):
    """Bipartite graph agent i -- item j whenever some Pareto-optimal assignment gives j to i"""
    graph = nx.Graph()
    graph.add_nodes_from((('agent', i) for i in range(m.n_agents)), bipartite=0)
    graph.add_nodes_from((('item', j) for j in range(m.n_items)), bipartite=1)
    count = 0
    for assignment in permutations(range(m.n_items)):
        if is_pareto_optimal(m, assignment):
            count += 1
            graph.add_edges_from((('agent', i), ('item', j)) for i, j in enumerate(assignment))
    logger.debug(f"{count} Pareto-optimal assignments")
    return graph


def _exact_components(m):
    graph = pareto_assignment_graph(m)
    blocks = []
    for nodes in nx.connected_components(graph):
        agents = tuple(sorted(i for kind, i in nodes if kind == 'agent'))
        items = tuple(sorted(j for kind, j in nodes if kind == 'item'))
        blocks.append(Block(agents, items))
    return ComponentPartition(_ordered(blocks), EXACT)


def _find_split(values, agents, items):
    """A proper sub-block (P', M') whose agents rank M' strictly above the rest of the block, and vice versa"""
    for a in agents:
        ranked = sorted(items, key=lambda j: -values[a][j])
        for k in range(1, len(items)):
            if values[a][ranked[k - 1]] == values[a][ranked[k]]:
                continue
            top = set(ranked[:k])
            rest = [j for j in items if j not in top]
            group = [b for b in agents
                     if min(values[b][j] for j in top) > max(values[b][j] for j in rest)]
            if len(group) != k:
                continue
            others = [b for b in agents if b not in group]
            if all(min(values[b][j] for j in rest) > max(values[b][j] for j in top) for b in others):
                return group, sorted(top), others, rest
    return None


def _preference_blocks(m):
    pending = [(list(range(m.n_agents)), list(range(m.n_items)))]
    blocks = []
    while pending:
        agents, items = pending.pop()
        split = _find_split(m.values, agents, items)
        if split is None:
            blocks.append(Block(tuple(sorted(agents)), tuple(sorted(items))))
            continue
        group, top, others, rest = split
        pending.append((group, top))
        pending.append((others, rest))
    return ComponentPartition(_ordered(blocks), SUFFICIENT)


def find_components_matching(m, method='auto'):
    """
    Partition agents and items into independent components.

    Args:
        m: square MatchingInstance
        method: 'exact' (Pareto-optimal assignment graph), 'fast'
            (preference blocks) or 'auto' (exact within the configured bound)
    """
    if not isinstance(m, MatchingInstance) or not m.is_square:
        raise IncompatibleOptionsError("Matching components need a square matching instance")
    if method == 'auto':
        method = 'exact' if m.n_agents <= settings.DECOMPOSE_EXACT_BOUND else 'fast'
    if method == 'exact':
        check_bound(m.n_agents, settings.DECOMPOSE_EXACT_BOUND, 'exact component agents', "use method='fast'")
        partition = _exact_components(m)
    elif method == 'fast':
        partition = _preference_blocks(m)
    else:
        raise IncompatibleOptionsError(f"Unknown component method {method!r}")
    logger.info(f"Found {len(partition.blocks)} component(s) ({partition.certificate})")
    return partition


# --- General components -----------------------------------------------------

def _general_view(inst):
    if isinstance(inst, MatchingInstance):
        view, _ = inst.as_instance()
        return view
    return inst


def pareto_profiles(inst, agents):
    """Non-dominated value profiles of the agent group, each with its first alternative"""
    profiles = {}
    for k in range(inst.n_alternatives):
        profile = tuple(inst.values[i][k] for i in agents)
        profiles.setdefault(profile, k)
    front = {}
    for p, k in profiles.items():
        dominated = any(
            q != p and all(x >= y for x, y in zip(q, p)) for q in profiles
        )
        if not dominated:
            front[p] = k
    return front


@dataclass(frozen=True)
class ComponentVerdict:
    ok: bool
    witness: Optional[Tuple[int, int]] = None

    def __bool__(self):
        return self.ok


def verify_component(inst, subset):
    """
    S is a component when for every alternative A Pareto-optimal for S and
    every B Pareto-optimal for the complement, some C matches A's values on S
    and B's values on the complement.
    """
    inst = _general_view(inst)
    n = inst.n_agents
    check_bound(n, settings.ENUMERATION_BOUND, 'verify_component agents')
    check_bound(inst.n_alternatives, settings.ALTERNATIVE_ENUMERATION_BOUND, 'verify_component alternatives')
    mask = to_mask(subset)
    inside = members(mask)
    outside = [i for i in range(n) if not mask >> i & 1]
    if not inside or not outside:
        return ComponentVerdict(True)
    combined = {
        (tuple(inst.values[i][k] for i in inside), tuple(inst.values[i][k] for i in outside))
        for k in range(inst.n_alternatives)
    }
    front_in = pareto_profiles(inst, inside)
    front_out = pareto_profiles(inst, outside)
    for p, a in front_in.items():
        for q, b in front_out.items():
            if (p, q) not in combined:
                return ComponentVerdict(False, (a, b))
    return ComponentVerdict(True)


def find_components_general(inst):
    """Minimal components by exhaustive verify_component (intersections of components are components)"""
    view = _general_view(inst)
    n = view.n_agents
    check_bound(n, settings.GENERAL_COMPONENT_BOUND, 'general component agents')
    components = [mask for mask in nonempty_subsets(n) if verify_component(view, mask)]
    blocks = {}
    for i in range(n):
        block = (1 << n) - 1
        for mask in components:
            if mask >> i & 1:
                block &= mask
        blocks[block] = Block(tuple(members(block)))
    return ComponentPartition(_ordered(blocks.values()), EXACT)


def verify_partition(inst, blocks):
    """Certify user-supplied agent blocks with verify_component"""
    blocks = [tuple(sorted(b)) for b in blocks]
    for b in blocks:
        if not verify_component(inst, b):
            raise InstanceError(f"Agents {list(b)} do not form an independent component")
    return ComponentPartition(_ordered(Block(b) for b in blocks), USER_SUPPLIED)


# --- Decomposability --------------------------------------------------------

@dataclass(frozen=True)
class WeakVerdict:
    ok: bool
    block: Optional[Tuple[int, ...]] = None
    net_transfer: Optional[Fraction] = None

    def __bool__(self):
        return self.ok


def check_weak_decomposability(inst, partition, sol):
    """The net transfer into every component is 0"""
    for b in partition.blocks:
        net = sum((sol.transfers[i] for i in b.agents), Fraction(0))
        if net != 0:
            return WeakVerdict(False, b.agents, net)
    return WeakVerdict(True)


def check_anticore_within_blocks(o, u, partition):
    """Anticore check restricted to subsets lying inside one block"""
    for b in partition.blocks:
        block_mask = to_mask(b.agents)
        sub = block_mask
        while sub:
            if sum((u[i] for i in members(sub)), Fraction(0)) > o.wmax(sub):
                return False
            sub = (sub - 1) & block_mask
    return True


def restrict_to_block(inst, block):
    if isinstance(inst, MatchingInstance):
        if block.items is None:
            raise InstanceError("Matching blocks need their item sets")
        return inst.restrict(block.agents, block.items)
    return inst.restrict_agents(block.agents)


@dataclass(frozen=True)
class StrongVerdict:
    ok: bool
    agent: Optional[int] = None
    u_whole: Optional[Fraction] = None
    u_component: Optional[Fraction] = None

    def __bool__(self):
        return self.ok


def check_strong_decomposability(mechanism, inst, partition, disagreement='rp', **options):
    """
    Utilities on the whole instance equal utilities on each component solved alone.

    The disagreement point is recomputed on every restricted instance with the
    same mode (explicit utilities are restricted to the block).
    """
    spec = get_mechanism(mechanism)
    if disagreement == 'rp-mc':
        raise IncompatibleOptionsError("Strong decomposability needs an exact disagreement point")

    def solve(sub, agents):
        d = None
        if spec.uses_disagreement:
            opts = dict(options)
            if disagreement == 'explicit':
                opts['utilities'] = [options['utilities'][i] for i in agents]
            d = disagreement_point(sub, disagreement, **opts)
        return run_mechanism(mechanism, sub, d)

    whole = solve(inst, range(inst.n_agents))
    for b in partition.blocks:
        part = solve(restrict_to_block(inst, b), b.agents)
        for k, i in enumerate(b.agents):
            if whole.utilities[i] != part.utilities[k]:
                logger.info(f"{mechanism}: agent {inst.agent_ids[i]} gets {whole.utilities[i]} "
                            f"on the whole instance but {part.utilities[k]} in its component")
                return StrongVerdict(False, i, whole.utilities[i], part.utilities[k])
    return StrongVerdict(True)
