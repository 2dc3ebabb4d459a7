"""
welfareshare: sharing the welfare of a chosen alternative with monetary transfers.

The egalitarian lexmax-WS rule is computed by water filling on submodular
instances and by a lexicographic LP otherwise; Shapley, envy-free max-min,
Kalai-Smorodinsky, Nash and nucleolus-WS are available for comparison.
All arithmetic is exact over fractions.Fraction.
"""

from welfareshare.disagreement import disagreement_point
from welfareshare.egalitarian import lexmax
from welfareshare.exceptions import (
    ConvergenceError, EmptyWSCoreError, EnumerationBoundError, FixtureError,
    IncompatibleOptionsError, InstanceError, WelfareShareError,
)
from welfareshare.fixtures import fixture
from welfareshare.mechanisms import MECHANISMS, run_mechanism, run_with_mode
from welfareshare.model import DisagreementPoint, Instance, MatchingInstance, Solution
from welfareshare.welfare import SetFunctionOracle

__version__ = '1.0.0'

__all__ = [
    'ConvergenceError', 'DisagreementPoint', 'EmptyWSCoreError', 'EnumerationBoundError',
    'FixtureError', 'IncompatibleOptionsError', 'Instance', 'InstanceError', 'MECHANISMS',
    'MatchingInstance', 'SetFunctionOracle', 'Solution', 'WelfareShareError',
    'disagreement_point', 'fixture', 'lexmax', 'run_mechanism', 'run_with_mode',
]
