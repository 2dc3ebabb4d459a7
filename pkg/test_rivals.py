"""
Tests for the rival mechanisms: Shapley, envy-free max-min, Kalai-Smorodinsky,
Nash and nucleolus-WS, plus the mechanism registry.
"""

from fractions import Fraction as F

import pytest

from welfareshare.core import check_anticore
from welfareshare.disagreement import disagreement_point, rp_exact
from welfareshare.exceptions import EmptyWSCoreError, IncompatibleOptionsError
from welfareshare.fixtures import fixture
from welfareshare.mechanisms import MECHANISMS, applicable, get_mechanism, run_mechanism, run_with_mode
from welfareshare.model import DisagreementPoint, Instance, apply_rent_shift
from welfareshare.rivals import (
    ef_maxmin, ks_bargaining, nash_bargaining, nucleolus_ws, reasonable_from_above,
    shapley, shapley_permutations, shapley_values,
)
from welfareshare.utils.subsets import to_mask
from welfareshare.welfare import SetFunctionOracle


def two(delta):
    m = fixture('TWO', delta)
    return m, SetFunctionOracle(m), rp_exact(m)


# --- Shapley ----------------------------------------------------------------

def test_shapley_two():
    delta = F(1, 5)
    _, o, _ = two(delta)
    assert shapley(o).utilities == (1 - delta, 0)


def test_shapley_formulas_agree(make_general):
    for _ in range(3):
        o = SetFunctionOracle(make_general(4, 5))
        assert shapley_values(o) == shapley_permutations(o)
        assert sum(shapley_values(o)) == o.wmax(o.full)


def test_shapley_leaves_anticore_on_ex3():
    o = SetFunctionOracle(fixture('EX3'))
    u = shapley(o).utilities
    assert u == (F(7, 6), F(7, 6), F(5, 3))
    verdict = check_anticore(o, u)
    assert not verdict
    assert verdict.subset == to_mask([0, 1]) and verdict.slack == F(-1, 3)


# --- Envy-free --------------------------------------------------------------

@pytest.mark.parametrize('name, transfers', [
    ('EF2', (-4, 2, 2)),
    ('EF3', (-4, 2, 2)),
    ('EF4', (-1, 0, 1)),
    ('EF5', (-5, 2, 1, 2)),
])
def test_ef_unique_transfers(name, transfers):
    sol = ef_maxmin(fixture(name))
    assert sol.alternative == tuple(range(len(transfers)))
    assert sol.transfers == transfers
    assert sol.item_transfers == transfers


def test_ef_two_equalises():
    delta = F(1, 5)
    m, _, _ = two(delta)
    sol = ef_maxmin(m)
    assert sol.utilities == ((1 - delta) / 2, (1 - delta) / 2)
    assert sol.item_transfers == (F(-3, 5), F(3, 5))


def test_ef_rent5_pays_player_five():
    eps = F(1, 10)
    sol = ef_maxmin(apply_rent_shift(fixture('RENT5', eps)))
    assert sol.alternative == (0, 1, 2, 3, 4)
    assert sol.transfers[4] == (2 - 8 * eps) / 5
    assert sol.transfers[4] > 0


def test_ef_ex1_is_envy_free():
    m = fixture('EX1', F(1, 10))
    sol = ef_maxmin(m)
    for i in range(3):
        for j in range(3):
            assert sol.utilities[i] >= m.values[i][j] + sol.item_transfers[j]


def test_ef_needs_square_matching():
    with pytest.raises(IncompatibleOptionsError):
        ef_maxmin(fixture('EX5'))
    with pytest.raises(IncompatibleOptionsError):
        ef_maxmin(fixture('NASH2'))


# --- Bargaining -------------------------------------------------------------

def test_ks_two():
    delta = F(1, 5)
    _, o, d = two(delta)
    assert ks_bargaining(o, d).utilities == ((1 - delta) / (1 + delta), delta * (1 - delta) / (1 + delta))


def test_ks_and_nash_on_ks4():
    m = fixture('KS4')
    o = SetFunctionOracle(m)
    d = rp_exact(m)
    ks = ks_bargaining(o, d)
    assert ks.utilities == (7, 10, 7, 16)
    verdict = check_anticore(o, ks.utilities)
    assert verdict.subset == to_mask([0, 1])
    assert nash_bargaining(o, d).utilities == (8, 10, 8, 14)


def test_ks_degenerate_ideal_point():
    inst = fixture('NASH2')
    o = SetFunctionOracle(inst)
    sol = ks_bargaining(o, DisagreementPoint.explicit((24, 4)))
    assert 'degenerate ideal point' in sol.notes
    assert sol.utilities == (22, 2)
    # d itself would overspend W_max(N) = 24 by 4
    assert sum(sol.utilities) == o.wmax(o.full) == 24
    # One alternative: sum(b) = sum(d) = W_max(N), so d is returned
    single = SetFunctionOracle(Instance(((3,), (1,))))
    balanced = ks_bargaining(single, DisagreementPoint.explicit((3, 1)))
    assert balanced.utilities == (3, 1)
    assert 'degenerate ideal point' in balanced.notes


def test_nash_violates_reasonable_from_above():
    inst = fixture('NASH2')
    o = SetFunctionOracle(inst)
    d = rp_exact(inst)
    sol = nash_bargaining(o, d)
    assert sol.utilities == (17, 7)
    assert not reasonable_from_above(o, sol.utilities)


# --- Nucleolus --------------------------------------------------------------

@pytest.mark.parametrize('delta, expected', [
    (F(1, 5), (F(7, 10), F(1, 10))),
    (F(1, 2), (F(1, 4), F(1, 4))),
])
def test_nucleolus_two(delta, expected):
    _, o, d = two(delta)
    assert nucleolus_ws(o, d).utilities == expected


def test_nucleolus_lies_in_core():
    m = fixture('EX5')
    o = SetFunctionOracle(m)
    d = rp_exact(m)
    sol = nucleolus_ws(o, d)
    assert check_anticore(o, sol.utilities)
    assert all(u >= di for u, di in zip(sol.utilities, d.utilities))


def test_nucleolus_empty_core():
    inst = fixture('EMPTY_CORE')
    with pytest.raises(EmptyWSCoreError):
        nucleolus_ws(SetFunctionOracle(inst), disagreement_point(inst, 'alternative', alternative=0))


# --- Registry ---------------------------------------------------------------

def test_registry():
    assert set(MECHANISMS) == {'lexmax', 'shapley', 'ef-maxmin', 'ks', 'nash', 'nucleolus-ws'}
    assert not get_mechanism('shapley').uses_disagreement
    with pytest.raises(IncompatibleOptionsError):
        get_mechanism('dictator')
    assert applicable('ef-maxmin', fixture('TWO'))
    assert not applicable('ef-maxmin', fixture('EX2'))


def test_run_mechanism_and_modes():
    m = fixture('TWO', F(1, 5))
    assert run_with_mode('lexmax', m, 'rp').utilities == (F(3, 5), F(1, 5))
    assert run_with_mode('nash', m, 'uniform').utilities == (F(2, 5), F(2, 5))
    assert run_mechanism('shapley', m).mechanism == 'shapley'
    with pytest.raises(IncompatibleOptionsError):
        run_mechanism('ks', m)
    with pytest.raises(IncompatibleOptionsError):
        run_mechanism('ef-maxmin', fixture('EX3'))
