"""
Tests for the disagreement mechanisms: Uniform, Random Priority (exact and
Monte-Carlo) and Eating.
"""

from collections import Counter
from fractions import Fraction as F
from itertools import permutations

import pytest

from welfareshare import settings
from welfareshare.disagreement import (
    MODES, disagreement_point, eating, random_dictatorship, rp_exact, rp_montecarlo,
    sample_orders, serial_dictatorship, uniform,
)
from welfareshare.exceptions import EnumerationBoundError, IncompatibleOptionsError, InstanceError
from welfareshare.fixtures import fixture
from welfareshare.model import EATING, RP_EXACT, RP_MONTECARLO, UNIFORM, Instance, MatchingInstance


def test_uniform_is_row_mean():
    d = uniform(fixture('EX2'))
    assert d.utilities == (0,) * 6
    assert d.provenance.kind == UNIFORM
    assert uniform(MatchingInstance(((1, 2), (0, 3)))).utilities == (F(3, 2), F(3, 2))


def test_rp_exact_two():
    d = rp_exact(fixture('TWO', F(1, 5)))
    assert d.utilities == (0, 0)
    assert d.provenance.kind == RP_EXACT


def test_rp_exact_ex1():
    assert rp_exact(fixture('EX1', F(1, 10))).utilities == (F(1, 2), F(1, 2), F(3, 5))


def test_rp_exact_ks4():
    assert rp_exact(fixture('KS4')).utilities == (6, 8, 6, 12)


def test_rp_exact_ex5_sub():
    assert rp_exact(fixture('EX5_SUB:123:ABC')).utilities == (8, 7, 14)
    assert rp_exact(fixture('EX5_SUB:12:ABC')).utilities == (9, 9)


def test_rp_exact_general_is_serial_dictatorship():
    assert rp_exact(fixture('NASH2')).utilities == (12, 2)


def test_rp_discontinuity_fixture():
    eps = F(1, 1000)
    d = rp_exact(fixture('RPDISC', eps))
    assert d.utilities[2] == F(1, 3) + 2 * eps / 3


def test_tie_free_shortcut_matches_enumeration():
    """The (agents, items) recursion must agree with enumerating every order"""
    from welfareshare import disagreement

    m = MatchingInstance(((9, 4, 1, 0), (8, 7, 3, 2), (1, 6, 5, 4), (3, 2, 9, 8)))
    assert disagreement._tie_free(m)
    fast = rp_exact(m).utilities
    orders = list(permutations(range(4)))
    slow = [sum((serial_dictatorship(m, o)[i] for o in orders), F(0)) / len(orders) for i in range(4)]
    assert fast == tuple(slow)


def test_serial_dictatorship_holds_tied_agents():
    # Agent 1 is indifferent between items 1 and 2; agent 2 then takes item 2,
    # so agent 1 ends up with item 1 at the same value
    m = MatchingInstance(((5, 5, 0), (1, 4, 0), (0, 0, 1)))
    assert serial_dictatorship(m, (0, 1, 2)) == (5, 4, 1)
    assert serial_dictatorship(m, (1, 0, 2)) == (5, 4, 1)


def test_serial_dictatorship_resolves_tight_holds():
    # Agents 1 and 2 both want {item1, item2}; after both are held that pair is
    # tight, so agent 3 must settle for item 3
    m = MatchingInstance(((3, 3, 0), (2, 2, 0), (5, 4, 1)))
    assert serial_dictatorship(m, (0, 1, 2)) == (3, 2, 1)


def test_random_dictatorship_breaks_ties_with_later_agents():
    inst = Instance(((1, 1, 0), (0, 2, 3)))
    assert random_dictatorship(inst, (0, 1)) == (1, 2)
    assert random_dictatorship(inst, (1, 0)) == (0, 3)


def test_rp_exact_bound(monkeypatch):
    monkeypatch.setattr(settings, 'RP_EXACT_BOUND', 3)
    with pytest.raises(EnumerationBoundError):
        rp_exact(fixture('KS4'))


def test_sample_orders_is_reproducible():
    a = sample_orders(4, 1000, seed=3, block_size=128)
    b = sample_orders(4, 1000, seed=3, block_size=128)
    assert a == b
    assert sum(a.values()) == 1000
    assert all(sorted(order) == [0, 1, 2, 3] for order in a)
    assert sample_orders(4, 1000, seed=4, block_size=128) != a


def test_rp_montecarlo_provenance_and_exactness():
    inst = fixture('KS4')
    d = rp_montecarlo(inst, samples=2000, seed=11)
    assert d.provenance.kind == RP_MONTECARLO
    assert d.provenance.seed == 11 and d.provenance.samples == 2000
    assert all(isinstance(u, F) for u in d.utilities)
    assert d.utilities == rp_montecarlo(inst, samples=2000, seed=11).utilities
    # Utilities are frequency-weighted means over whole orders
    counts = sample_orders(4, 2000, 11)
    assert isinstance(counts, Counter)
    with pytest.raises(InstanceError):
        rp_montecarlo(inst, samples=0)


def test_rp_montecarlo_records_block_size(monkeypatch):
    inst = fixture('KS4')
    d = rp_montecarlo(inst, samples=1000, seed=3)
    assert d.provenance.block_size == settings.MC_BLOCK_SIZE
    small = rp_montecarlo(inst, samples=1000, seed=3, block_size=128)
    assert small.provenance.block_size == 128
    assert small.provenance.describe() == 'rp_montecarlo(seed=3, samples=1000, block_size=128)'
    # Same seed, samples and block size reproduce the draw whatever the setting says
    monkeypatch.setattr(settings, 'MC_BLOCK_SIZE', 128)
    assert rp_montecarlo(inst, samples=1000, seed=3).utilities == small.utilities
    assert rp_montecarlo(inst, samples=1000, seed=3, block_size=4096).utilities == d.utilities
    with pytest.raises(InstanceError):
        rp_montecarlo(inst, samples=10, block_size=0)


def test_rp_montecarlo_converges():
    inst = fixture('EX5')
    exact = rp_exact(inst).utilities
    sampled = rp_montecarlo(inst, samples=20000, seed=0).utilities
    spread = max(max(row) - min(row) for row in inst.values)
    for e, s in zip(exact, sampled):
        assert abs(float(e - s)) <= 4 * float(spread) / (2 * 20000 ** 0.5)


def test_eating_rpdisc():
    schedule, d = eating(fixture('RPDISC', F(1, 1000)))
    assert schedule.allocation[2][0] == F(1, 3)
    assert schedule.is_doubly_stochastic()
    assert schedule.phases[0].length == F(1, 3)
    assert schedule.phases[0].consumed == ('item1',)
    assert d.provenance.kind == EATING
    assert sum(schedule.phases[k].length for k in range(len(schedule.phases))) == 1


def test_eating_non_square_rows_sum_to_one():
    schedule, _ = eating(MatchingInstance(((3, 2, 1), (3, 1, 2))))
    assert schedule.row_sums() == (1, 1)
    assert all(c <= 1 for c in schedule.column_sums())


def test_eating_needs_matching():
    with pytest.raises(IncompatibleOptionsError):
        eating(fixture('NASH2'))


def test_disagreement_point_dispatch():
    inst = fixture('WF_FAIL')
    assert disagreement_point(inst, 'alternative', alternative=0).utilities == (0, 0, 0)
    assert disagreement_point(inst, 'alternative', alternative='A2').utilities == (-2, 2, 2)
    assert disagreement_point(inst, 'explicit', utilities=(1, 2, 3)).utilities == (1, 2, 3)
    with pytest.raises(InstanceError):
        disagreement_point(inst, 'alternative', alternative=9)
    with pytest.raises(InstanceError):
        disagreement_point(inst, 'explicit', utilities=(1, 2))
    with pytest.raises(IncompatibleOptionsError):
        disagreement_point(inst, 'eating')
    with pytest.raises(IncompatibleOptionsError):
        disagreement_point(inst, 'psychic')
    assert 'rp-mc' in MODES
