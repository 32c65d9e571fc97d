from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import partition_matroids, systems
from setmax.constructions import build_tight_supermodular
from setmax.model import InvalidInstanceError
from setmax.solvers import extendible_greedy_supermodular
from setmax.systems import (
    CustomSystem,
    Intersection,
    PartitionMatroid,
    PreconditionError,
    UniformMatroid,
    extend_to_base,
    extension_candidates,
    is_base,
    k_system_ratio,
    max_k_system_ratio,
    verify_hereditary,
    verify_k_extendible,
    verify_matroid,
)


def test_independence_examples():
    assert not UniformMatroid(4, 2).is_independent({0, 1, 2})
    assert PartitionMatroid(4, [[0, 1], [2, 3]]).is_independent({0, 2})
    assert not PartitionMatroid(4, [[0, 1], [2, 3]]).is_independent({0, 1})
    for sys_ in (UniformMatroid(3, 0), PartitionMatroid(3, [[0, 1, 2]]), Intersection([UniformMatroid(3, 1)])):
        assert sys_.is_independent(set())


def test_partition_validation():
    with pytest.raises(InvalidInstanceError):
        PartitionMatroid(3, [[0, 1], [1, 2]])
    with pytest.raises(InvalidInstanceError):
        PartitionMatroid(3, [[0, 1]], [1, 2])
    free = PartitionMatroid(3, [[0, 1]])
    assert free.is_independent({0, 2})


def test_is_base_examples():
    u = UniformMatroid(5, 3)
    assert is_base(u, {0, 1, 4})
    assert not is_base(u, {0, 1})
    with pytest.raises(PreconditionError):
        is_base(u, {0, 1, 2, 3})
    inst = build_tight_supermodular(1, 2)
    out = extendible_greedy_supermodular(inst.f, inst.system, inst.oracles())
    assert is_base(inst.system, out.solution)


def test_extension_helpers():
    p = PartitionMatroid(4, [[0, 1], [2, 3]])
    assert extension_candidates(p, {0}) == [2, 3]
    assert extend_to_base(p, {1}) == {1, 2}


def test_matroids_are_one_extendible():
    assert verify_k_extendible(UniformMatroid(5, 2), 1)
    assert verify_k_extendible(PartitionMatroid(5, [[0, 1], [2, 3, 4]], [1, 2]), 1)


def test_two_partition_intersection_is_two_extendible_not_matroid():
    # 4-cycle: rows {0,1},{2,3} and columns {0,2},{1,3}
    rows = PartitionMatroid(4, [[0, 1], [2, 3]])
    cols = PartitionMatroid(4, [[0, 2], [1, 3]])
    inter = Intersection([rows, cols])
    assert verify_k_extendible(inter, 2)
    cycle = verify_matroid(inter)
    assert not cycle
    s, t = cycle.witness
    assert inter.is_independent(s) and inter.is_independent(t)
    # a path-like pattern defeats augmentation
    a = PartitionMatroid(3, [[0, 1]])
    b = PartitionMatroid(3, [[1, 2]])
    bad = Intersection([a, b])
    res = verify_matroid(bad)
    assert not res
    s, t = res.witness
    assert len(s) == len(t) + 1
    assert verify_matroid(UniformMatroid(4, 2))
    assert verify_matroid(rows)


def test_non_hereditary_custom_system_detected():
    weird = CustomSystem(3, lambda s: len(s) != 1)
    assert not verify_hereditary(weird)


def test_k_system_ratio_examples():
    assert k_system_ratio(UniformMatroid(4, 2)) == 1
    assert max_k_system_ratio(PartitionMatroid(4, [[0, 1], [2, 3]])) == 1
    inst = build_tight_supermodular(1, 1)
    assert k_system_ratio(inst.system) <= 1
    a = PartitionMatroid(3, [[0, 1]])
    b = PartitionMatroid(3, [[1, 2]])
    assert max_k_system_ratio(Intersection([a, b])) == Fraction(2, 1)


@given(st.integers(1, 7).flatmap(lambda n: systems(n)))
def test_shipped_systems_are_hereditary(system):
    assert verify_hereditary(system)


@given(st.integers(1, 7).flatmap(lambda n: st.lists(partition_matroids(n), min_size=1, max_size=3)))
def test_intersection_of_m_matroids_is_m_extendible(ms):
    inter = Intersection(ms)
    assert inter.extendibility == len(ms)
    assert verify_k_extendible(inter, len(ms))


@given(st.integers(1, 7).flatmap(lambda n: partition_matroids(n)))
def test_matroids_have_unit_ratio(m):
    assert verify_matroid(m)
    assert max_k_system_ratio(m) == 1


@given(st.integers(1, 7).flatmap(lambda n: st.lists(partition_matroids(n), min_size=1, max_size=3)))
def test_ratio_bounded_by_extendibility(ms):
    inter = Intersection(ms)
    assert max_k_system_ratio(inter) <= len(ms)
