"""Registry of the solution mechanisms, addressable by tag"""

import logging
from dataclasses import dataclass
from typing import Callable

from welfareshare.disagreement import disagreement_point
from welfareshare.egalitarian import lexmax
from welfareshare.exceptions import IncompatibleOptionsError
from welfareshare.model import MatchingInstance
from welfareshare.rivals import ef_maxmin, ks_bargaining, nash_bargaining, nucleolus_ws, shapley
from welfareshare.welfare import SetFunctionOracle

logger = logging.getLogger('welfareshare')


@dataclass(frozen=True)
class Mechanism:
    name: str
    run: Callable
    uses_disagreement: bool = True
    matching_only: bool = False
    needs_core: bool = False


def _lexmax(inst, o, d):
    return lexmax(o, d).solution


MECHANISMS = {m.name: m for m in (
    Mechanism('lexmax', _lexmax, needs_core=True),
    Mechanism('shapley', lambda inst, o, d: shapley(o), uses_disagreement=False),
    Mechanism('ef-maxmin', lambda inst, o, d: ef_maxmin(inst), uses_disagreement=False, matching_only=True),
    Mechanism('ks', lambda inst, o, d: ks_bargaining(o, d)),
    Mechanism('nash', lambda inst, o, d: nash_bargaining(o, d)),
    Mechanism('nucleolus-ws', lambda inst, o, d: nucleolus_ws(o, d), needs_core=True),
)}


def get_mechanism(name):
    try:
        return MECHANISMS[name]
    except KeyError:
        raise IncompatibleOptionsError(f"Unknown mechanism {name!r}; expected one of {', '.join(MECHANISMS)}") from None


def applicable(name, inst):
    mechanism = get_mechanism(name)
    return not mechanism.matching_only or (isinstance(inst, MatchingInstance) and inst.is_square)


def run_mechanism(name, inst, d=None, oracle=None):
    """
    Run a registered mechanism on an instance.

    Args:
        name: mechanism tag
        inst: Instance or MatchingInstance
        d: DisagreementPoint (required unless the mechanism ignores it)
        oracle: reuse an existing SetFunctionOracle for inst
    """
    mechanism = get_mechanism(name)
    if not applicable(name, inst):
        raise IncompatibleOptionsError(f"{name} needs a square matching instance")
    if mechanism.uses_disagreement and d is None:
        raise IncompatibleOptionsError(f"{name} needs a disagreement point")
    o = oracle or SetFunctionOracle(inst)
    logger.debug(f"Running {name} on {inst.name or 'instance'} ({inst.n_agents} agents)")
    return mechanism.run(inst, o, d)


def run_with_mode(name, inst, mode, **options):
    """Run a mechanism with its disagreement point computed from a mode name"""
    mechanism = get_mechanism(name)
    d = disagreement_point(inst, mode, **options) if mechanism.uses_disagreement else None
    return run_mechanism(name, inst, d)
