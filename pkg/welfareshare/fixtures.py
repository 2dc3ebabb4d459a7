"""
Worked-example instances, addressable by name.

Each fixture is built exactly (Fractions throughout). Parametrised fixtures
take one parameter, given either as a Python value or as the text after the
colon in ``NAME:PARAM`` on the command line.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Optional

from welfareshare.exceptions import FixtureError
from welfareshare.model import Instance, MatchingInstance
from welfareshare.utils.rational import parse_rational

logger = logging.getLogger('welfareshare')

F = Fraction


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    builder: Callable
    description: str
    param: Optional[str] = None
    default: object = None
    # Disagreement used by the worked example, when it is not a mechanism
    disagreement: Optional[tuple] = None


def _open_interval(name, value, low, high):
    if not low < value < high:
        raise FixtureError(f"{name} requires {low} < parameter < {high}, got {value}")


def ex1(delta):
    """Three students, three rooms; students 1 and 2 compete for rooms 1 and 2"""
    _open_interval('EX1', delta, 0, F(1, 4))
    return MatchingInstance(
        ((1 - delta, delta, 0),
         (1 - 2 * delta, 2 * delta, 0),
         (0, F(1, 2) - delta, F(1, 2) + delta)),
        ('room1', 'room2', 'room3'),
        name=f"EX1({delta})",
    )


def ex2():
    """Six agents, four alternatives; the lexmax point is not min-square"""
    columns = {
        'A': (1, 1, 1, 1, 3, 3),
        'B': (0, 2, 2, 2, 2, 2),
        'C': (-1, -1, -1, -1, 4, -9),
        'D': (0, -2, -2, -2, -9, 4),
    }
    labels = tuple(columns)
    values = tuple(tuple(columns[a][i] for a in labels) for i in range(6))
    return Instance(values, labels, name='EX2')


def ex3():
    """Three agents, four alternatives; the Shapley value leaves the anticore"""
    return Instance(((2, 0, 0, 1), (0, 2, 0, 1), (0, 0, 2, 2)), name='EX3')


def ex4():
    """
    Three items given to four agents (every item goes to some agent).

    A, B, C are additive; D is budget-additive with cap 2, which breaks
    submodularity of W_max.
    """
    agents = ('A', 'B', 'C', 'D')
    additive = {'A': (1, 0, 0), 'B': (0, 2, 0), 'C': (0, 0, 2), 'D': (2, 1, 1)}
    caps = {'D': 2}
    alternatives = list(product(range(4), repeat=3))
    values = []
    for k, agent in enumerate(agents):
        row = []
        for owners in alternatives:
            total = sum(additive[agent][item] for item, owner in enumerate(owners) if owner == k)
            if agent in caps:
                total = min(total, caps[agent])
            row.append(total)
        values.append(tuple(row))
    labels = tuple(''.join(agents[o] for o in owners) for owners in alternatives)
    return Instance(tuple(values), labels, agents, name='EX4')


EX5_VALUES = ((12, 0, 6, 0), (12, 6, 0, 0), (24, 12, 0, 25))
EX5_ITEMS = ('A', 'B', 'C', 'D')


def ex5():
    """Three agents, four items (population monotonicity example)"""
    return MatchingInstance(EX5_VALUES, EX5_ITEMS, name='EX5')


def ex5_sub(param=('123', 'ABC')):
    """EX5 restricted to some agents ("123") and items ("ABC"); "12:ABC" on the command line"""
    if isinstance(param, str):
        agents, _, items = param.partition(':')
    else:
        agents, items = param
    agents = [str(a) for a in agents]
    items = [str(j) for j in items]
    base = ex5()
    try:
        agent_idx = [base.agent_ids.index(a) for a in agents]
        item_idx = [base.item_ids.index(j) for j in items]
    except ValueError as e:
        raise FixtureError(f"EX5_SUB: unknown agent or item in {param!r}") from e
    if not agent_idx or len(item_idx) < len(agent_idx):
        raise FixtureError(f"EX5_SUB needs 1 <= agents <= items, got {agents} x {items}")
    sub = base.restrict(agent_idx, item_idx)
    return MatchingInstance(sub.values, sub.item_ids, sub.agent_ids,
                            name=f"EX5_SUB({''.join(agents)}:{''.join(items)})")


def two(delta):
    """Two agents, two items; values normalised to (1,-1) and (delta,-delta)"""
    if not 0 < delta <= 1:
        raise FixtureError(f"TWO requires 0 < parameter <= 1, got {delta}")
    return MatchingInstance(((1, -1), (delta, -delta)), ('a', 'b'), ('A', 'B'), name=f"TWO({delta})")


def wf_fail():
    """Water filling stops before distributing all welfare (use alternative A1 as disagreement)"""
    return Instance(((0, -2, 2), (0, 2, -1), (0, 2, -1)), name='WF_FAIL')


def empty_core():
    """Empty WS-core when alternative A1 is the disagreement"""
    return Instance(((0, -1), (0, 1), (0, 1)), name='EMPTY_CORE')


def ks4():
    """Two independent pairs of agents; Kalai-Smorodinsky transfers between them"""
    return MatchingInstance(
        ((4, 8, 0, 0), (4, 12, 0, 0), (0, 0, 4, 8), (0, 0, 4, 20)),
        name='KS4',
    )


def _lip(n, top):
    n = int(n)
    if n < 3:
        raise FixtureError(f"LIP requires n >= 3, got {n}")
    rows = [(1, top, 0, 0)]
    rows += [(1, 0, 6, 0)] * (n - 2)
    rows.append((1, 0, 0, 6 * n))
    return Instance(tuple(rows), name=f"LIP({n})" if top == 2 else f"LIP_SHIFT({n})")


def lip(n):
    """n agents, four alternatives; lexmax has a large Lipschitz constant (A1 is the disagreement)"""
    return _lip(n, 2)


def lip_shift(n):
    """LIP(n) with agent 1's value for A2 raised from 2 to 3"""
    return _lip(n, 3)


def rent5(eps):
    """Five-room rental with rent 1; envy-freeness pays player 5 more than an equal rent share"""
    _open_interval('RENT5', eps, 0, F(1, 8))
    third = (1 - eps) / 3
    return MatchingInstance(
        ((1 - eps, 0, eps, 0, 0),
         (0, 1 - eps, 0, eps, 0),
         (1 - eps, 0, eps, 0, 0),
         (0, 1 - eps, 0, eps, 0),
         (0, 0, third, third, (1 + 2 * eps) / 3)),
        rent=1,
        name=f"RENT5({eps})",
    )


def rpdisc(eps):
    """Three players; player 3 wins item 1 with probability 1/3 under RP and Eating"""
    _open_interval('RPDISC', eps, 0, F(1, 2))
    return MatchingInstance(
        ((1, 1 - eps, eps), (1, 1 - eps, eps), (1, 0, eps)),
        name=f"RPDISC({eps})",
    )


def ef2():
    return MatchingInstance(((6, 0, 0), (6, 0, 0), (0, 6, 6)), name='EF2')


def ef3():
    return MatchingInstance(((6, 0, 0), (6, 0, 0), (1, 0, 0)), name='EF3')


def ef4():
    return MatchingInstance(((2, 1, 0), (2, 1, 0), (0, 1, 0)), name='EF4')


def ef5():
    return MatchingInstance(((7, 0, 0, 0), (7, 0, 0, 0), (2, 0, 1, 0), (2, 0, 1, 0)), name='EF5')


def nash2():
    """Two agents, two alternatives; random dictatorship gives d = (12, 2)"""
    return Instance(((24, 0), (0, 4)), name='NASH2')


FIXTURES = {spec.name: spec for spec in (
    FixtureSpec('EX1', ex1, 'rooms for three students', 'rational', F(1, 10)),
    FixtureSpec('EX2', ex2, 'lexmax differs from min-square'),
    FixtureSpec('EX3', ex3, 'Shapley value outside the anticore'),
    FixtureSpec('EX4', ex4, 'non-submodular W_max (budget-additive agent)'),
    FixtureSpec('EX5', ex5, 'population monotonicity, full instance'),
    FixtureSpec('EX5_SUB', ex5_sub, 'EX5 restricted to agents:items', 'agents:items', '123:ABC'),
    FixtureSpec('TWO', two, 'two agents, closed-form comparison', 'rational', F(1, 5)),
    FixtureSpec('WF_FAIL', wf_fail, 'water filling halts early', disagreement=('alternative', 0)),
    FixtureSpec('EMPTY_CORE', empty_core, 'empty WS-core', disagreement=('alternative', 0)),
    FixtureSpec('KS4', ks4, 'Kalai-Smorodinsky is not decomposable'),
    FixtureSpec('LIP', lip, 'lexmax Lipschitz constant grows with n', 'integer', 5, ('alternative', 0)),
    FixtureSpec('LIP_SHIFT', lip_shift, 'LIP with one value raised by 1', 'integer', 5, ('alternative', 0)),
    FixtureSpec('RENT5', rent5, 'five-room rental with rent 1', 'rational', F(1, 10)),
    FixtureSpec('RPDISC', rpdisc, 'RP and Eating discontinuity', 'rational', F(1, 1000)),
    FixtureSpec('EF2', ef2, 'unique envy-free transfers (-4, 2, 2)'),
    FixtureSpec('EF3', ef3, 'unique envy-free transfers (-4, 2, 2)'),
    FixtureSpec('EF4', ef4, 'unique envy-free transfers (-1, 0, 1)'),
    FixtureSpec('EF5', ef5, 'unique envy-free transfers (-5, 2, 1, 2)'),
    FixtureSpec('NASH2', nash2, 'Nash solution above the best alternative'),
)}


def _coerce(spec, param):
    if spec.param == 'rational':
        return parse_rational(param) if isinstance(param, str) else Fraction(param)
    if spec.param == 'integer':
        try:
            return int(param)
        except (TypeError, ValueError) as e:
            raise FixtureError(f"{spec.name} needs an integer parameter, got {param!r}") from e
    return param


def fixture(name, param=None):
    """
    Build a fixture by name.

    Args:
        name: fixture name, case-insensitive; "NAME:PARAM" is accepted
        param: parameter for parametrised fixtures (defaults apply when omitted)

    Returns:
        Instance or MatchingInstance
    """
    if param is None and ':' in name:
        name, _, param = name.partition(':')
    key = name.strip().upper()
    spec = FIXTURES.get(key)
    if spec is None:
        raise FixtureError(f"Unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    if spec.param is None:
        if param not in (None, ''):
            raise FixtureError(f"{key} takes no parameter")
        return spec.builder()
    value = _coerce(spec, spec.default if param in (None, '') else param)
    logger.debug(f"Building fixture {key} with parameter {value}")
    try:
        return spec.builder(value)
    except FixtureError:
        raise
    except Exception as e:
        raise FixtureError(f"Cannot build {key}({param}): {e}") from e


def default_disagreement(name):
    """Disagreement mode the worked example uses, or None when any mechanism applies"""
    key = name.partition(':')[0].strip().upper()
    spec = FIXTURES.get(key)
    return spec.disagreement if spec else None
