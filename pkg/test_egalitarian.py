"""
Tests for water filling, the lexmax LP, Lorenz comparison and the
min-square diagnostic.
"""

from fractions import Fraction as F

import numpy as np
import pytest

from welfareshare.core import check_anticore
from welfareshare.disagreement import disagreement_point, rp_exact, uniform
from welfareshare.egalitarian import (
    EQUAL, INCOMPARABLE, U_DOMINATES, W_DOMINATES,
    lexmax, lexmax_lp, lexmax_vector, lorenz_compare, min_square_diag,
    reconstruct_from_tight_sets, sum_squares, water_filling,
)
from welfareshare.exceptions import EmptyWSCoreError, InstanceError
from welfareshare.fixtures import fixture
from welfareshare.model import DisagreementPoint
from welfareshare.welfare import SetFunctionOracle, is_submodular


@pytest.mark.parametrize('delta, expected', [
    (F(1, 5), (F(3, 5), F(1, 5))),
    (F(1, 3), (F(1, 3), F(1, 3))),
    (F(1, 2), (F(1, 4), F(1, 4))),
])
def test_two_closed_form(delta, expected):
    m = fixture('TWO', delta)
    result = lexmax(SetFunctionOracle(m), rp_exact(m))
    assert result.method == 'water_filling'
    assert result.solution.utilities == expected
    assert result.solution.alternative == (0, 1)


def test_water_filling_trace_two():
    m = fixture('TWO', F(1, 5))
    o = SetFunctionOracle(m)
    solution, trace = water_filling(o, rp_exact(m))
    assert trace.exhausted
    assert [step.increment for step in trace.iterations] == [F(1, 5), F(2, 5)]
    assert trace.iterations[0].locked == (1,)
    assert trace.to_dict(['A', 'B'])['iterations'][0]['tight_sets'] == ['{B}']
    assert reconstruct_from_tight_sets(trace, o, rp_exact(m)) == solution.utilities


def test_ex5_sub_lexmax():
    m = fixture('EX5_SUB:123:ABC')
    o = SetFunctionOracle(m)
    d = rp_exact(m)
    result = lexmax(o, d)
    assert result.solution.utilities == (F(19, 2), F(17, 2), 18)
    assert lexmax_lp(o, d).utilities == result.solution.utilities


def test_water_filling_halts_on_wf_fail():
    inst = fixture('WF_FAIL')
    o = SetFunctionOracle(inst)
    d = disagreement_point(inst, 'alternative', alternative=0)
    solution, trace = water_filling(o, d)
    assert solution is None
    assert not trace.exhausted
    assert trace.utilities == (F(1, 2), F(1, 2), F(1, 2))
    result = lexmax(o, d)
    assert result.method == 'lexmax_lp'
    assert result.solution.utilities == (0, 1, 1)


def test_empty_core_raises():
    inst = fixture('EMPTY_CORE')
    o = SetFunctionOracle(inst)
    d = disagreement_point(inst, 'alternative', alternative=0)
    with pytest.raises(EmptyWSCoreError):
        lexmax(o, d)


def test_water_filling_rejects_disagreement_outside_anticore():
    o = SetFunctionOracle(fixture('NASH2'))
    with pytest.raises(EmptyWSCoreError):
        water_filling(o, DisagreementPoint.explicit((25, 0)))


def test_lip_fixtures():
    for name, expected in (('LIP:5', (2, 4, 4, 4, 16)), ('LIP_SHIFT:5', (3, 3, 3, 3, 18))):
        inst = fixture(name)
        d = disagreement_point(inst, 'alternative', alternative=0)
        assert lexmax(SetFunctionOracle(inst), d).solution.utilities == expected


@pytest.mark.parametrize('n', [5, 6, 7])
def test_lexmax_is_not_lipschitz_without_submodularity(n):
    """
    LIP_SHIFT(n) raises one value of agent 1 by 1, yet agent n loses n - 3.
    """
    before, after = fixture(f"LIP:{n}"), fixture(f"LIP_SHIFT:{n}")
    o, o_shift = SetFunctionOracle(before), SetFunctionOracle(after)
    assert not is_submodular(o)
    spread = max(b - a for a, b in zip(before.values[0], after.values[0]))
    assert spread == 1
    d = disagreement_point(before, 'alternative', alternative=0)
    assert disagreement_point(after, 'alternative', alternative=0).utilities == d.utilities
    u = lexmax(o, d).solution.utilities
    w = lexmax(o_shift, d).solution.utilities
    assert u == (2,) + (4,) * (n - 2) + (2 * n + 6,)
    assert w == (3,) * (n - 1) + (3 * n + 3,)
    assert u[-1] - w[-1] == n - 3 > spread


def test_lexmax_vector_levels_on_ex4():
    o = SetFunctionOracle(fixture('EX4'))
    utilities, levels = lexmax_vector(o, DisagreementPoint.zeros(4))
    assert sum(utilities) == 6
    assert check_anticore(o, utilities)
    assert levels and levels[0].level == min(utilities)


def test_lexmax_explicit_oracle_uses_lp():
    o = SetFunctionOracle.from_table(2, (0, 2, 2, 3))
    utilities, _ = lexmax_vector(o, DisagreementPoint.zeros(2))
    assert utilities == (F(3, 2), F(3, 2))
    with pytest.raises(EmptyWSCoreError):
        lexmax_vector(SetFunctionOracle.from_table(2, (0, 1, 1, 3)), DisagreementPoint.zeros(2))


def test_lorenz_compare():
    assert lorenz_compare((2, 2), (1, 3)) == U_DOMINATES
    assert lorenz_compare((1, 3), (2, 2)) == W_DOMINATES
    assert lorenz_compare((3, 1), (1, 3)) == EQUAL
    with pytest.raises(InstanceError):
        lorenz_compare((1, 2), (1, 1))


def test_ex2_lexmax_is_not_min_square():
    inst = fixture('EX2')
    o = SetFunctionOracle(inst)
    d = uniform(inst)
    lex = lexmax(o, d).solution.utilities
    assert lex == (1, 1, 1, 1, 3, 3)
    other = (0, 2, 2, 2, 2, 2)
    assert sum_squares(lex) == 22
    assert sum_squares(other) == 20
    assert lorenz_compare(lex, other) == INCOMPARABLE
    point = min_square_diag(o, d)
    assert isinstance(point, np.ndarray)
    assert float(np.dot(point, point)) < 20 + 1e-6
    assert abs(point.sum() - 10) < 1e-6
    assert np.max(np.abs(point - np.array([float(x) for x in lex]))) > 0.5
