"""
Tests for the domain types: instances, disagreement points and solutions.
"""

from fractions import Fraction as F

import pytest

from welfareshare.exceptions import EnumerationBoundError, InstanceError
from welfareshare.model import (
    EXPLICIT, RP_MONTECARLO,
    DisagreementPoint, Instance, MatchingInstance, Provenance, Solution,
    apply_rent_shift, build_solution, normalize_to_disagreement,
)


def test_instance_defaults_and_coercion():
    inst = Instance(((1, '1/2'), (0, 3)))
    assert inst.values == ((F(1), F(1, 2)), (F(0), F(3)))
    assert inst.agent_ids == ('1', '2')
    assert inst.alternative_ids == ('A1', 'A2')
    assert inst.kind == 'general'
    assert inst.n_agents == 2
    assert inst.n_alternatives == 2
    assert inst.alternative_values(1) == (F(1, 2), F(3))
    assert inst.welfare(1) == F(7, 2)
    assert inst.welfare(0, agents=[0]) == 1


@pytest.mark.parametrize('values', [(), ((),), ((1, 2), (3,))])
def test_instance_rejects_bad_matrices(values):
    with pytest.raises(InstanceError):
        Instance(values)


def test_instance_rejects_label_mismatch():
    with pytest.raises(InstanceError):
        Instance(((1, 2),), alternative_ids=('X',))
    with pytest.raises(InstanceError):
        Instance(((1, 2),), agent_ids=('a', 'b'))


def test_instance_restrict_and_shift():
    inst = Instance(((1, 2), (3, 4), (5, 6)), agent_ids=('a', 'b', 'c'), name='T')
    sub = inst.restrict_agents([2, 0])
    assert sub.agent_ids == ('c', 'a')
    assert sub.values == ((5, 6), (1, 2))
    assert sub.name == 'T|c,a'
    shifted = inst.shifted((1, 2, 3))
    assert shifted.values[2] == (F(2), F(3))


def test_matching_instance_basics():
    m = MatchingInstance(((3, 1, 0), (2, 2, 1)))
    assert m.kind == 'matching'
    assert m.item_ids == ('item1', 'item2', 'item3')
    assert not m.is_square
    assert m.n_alternatives == 6
    assert len(list(m.assignments())) == 6
    assert m.alternative_values((2, 0)) == (F(0), F(2))
    assert m.alternative_label((2, 0)) == '(1->item3, 2->item1)'
    assert m.welfare((0, 1)) == 5


def test_matching_instance_needs_enough_items():
    with pytest.raises(InstanceError):
        MatchingInstance(((1,), (2,)))


def test_matching_restrict_reindexes_items():
    m = MatchingInstance(((1, 2, 3), (4, 5, 6), (7, 8, 9)), ('x', 'y', 'z'), name='M')
    sub = m.restrict([1, 2], [2, 0])
    assert sub.values == ((6, 4), (9, 7))
    assert sub.item_ids == ('z', 'x')
    assert sub.agent_ids == ('2', '3')


def test_matching_as_instance():
    m = MatchingInstance(((1, 0), (0, 2)))
    inst, assignments = m.as_instance()
    assert assignments == [(0, 1), (1, 0)]
    assert inst.values == ((1, 0), (2, 0))
    assert inst.alternative_ids[0] == '(1->item1, 2->item2)'


def test_as_instance_respects_bound(monkeypatch):
    from welfareshare import settings
    monkeypatch.setattr(settings, 'ALTERNATIVE_ENUMERATION_BOUND', 5)
    with pytest.raises(EnumerationBoundError):
        MatchingInstance(((1, 2, 3),) * 3).as_instance()


def test_rent_shift():
    m = MatchingInstance(((4, 1), (2, 2)), rent=3)
    shifted = apply_rent_shift(m)
    assert shifted.rent is None
    assert shifted.values == ((F(5, 2), F(-1, 2)), (F(1, 2), F(1, 2)))
    assert apply_rent_shift(shifted) is shifted
    with pytest.raises(InstanceError):
        apply_rent_shift(MatchingInstance(((1, 2, 3),), rent=1))


def test_disagreement_point_constructors():
    inst = Instance(((1, 3), (2, 0)))
    d = DisagreementPoint.from_alternative(inst, 1)
    assert d.utilities == (F(3), F(0))
    assert d.provenance.kind == EXPLICIT
    assert 'A2' in d.provenance.describe()
    mixed = DisagreementPoint.from_distribution(inst, ('1/4', '3/4'))
    assert mixed.utilities == (F(5, 2), F(1, 2))
    with pytest.raises(InstanceError):
        DisagreementPoint.from_distribution(inst, (1, 1))
    zeros = DisagreementPoint.zeros(3)
    assert len(zeros) == 3 and zeros[2] == 0
    assert d.restrict([1]).utilities == (F(0),)
    with pytest.raises(InstanceError):
        d.check_length(3)


def test_provenance_describe():
    assert Provenance(RP_MONTECARLO, seed=7, samples=100).describe() == 'rp_montecarlo(seed=7, samples=100)'
    described = Provenance(RP_MONTECARLO, seed=7, samples=100, block_size=64).describe()
    assert described == 'rp_montecarlo(seed=7, samples=100, block_size=64)'
    with pytest.raises(InstanceError):
        Provenance('guess')


def test_solution_checks_budget_and_consistency():
    Solution(0, (1, 2), (1, -1), (2, 1), 'test')
    with pytest.raises(InstanceError):
        Solution(0, (1, 2), (1, 0), (2, 2), 'test')
    with pytest.raises(InstanceError):
        Solution(0, (1, 2), (1, -1), (2, 2), 'test')


def test_build_solution_derives_transfers():
    inst = Instance(((4, 0), (0, 1)))
    sol = build_solution(inst, 0, (3, 1), 'demo')
    assert sol.transfers == (F(-1), F(1))
    assert sol.alternative_label == 'A1'
    assert sol.n_agents == 2


def test_normalize_to_disagreement():
    inst = Instance(((4, 0), (0, 1)))
    shifted = normalize_to_disagreement(inst, DisagreementPoint.explicit((2, '1/2')))
    assert shifted.values == ((F(2), F(-2)), (F(-1, 2), F(1, 2)))
