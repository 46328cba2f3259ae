"""Partition statistics and the two bound polynomial families."""

import pytest
from hypothesis import given, settings, strategies as st

from orderzeta.partitions import (Partition, hilb_count_regular, m_poly,
                                  n_poly, partitions)
from orderzeta.polynomials import IntPoly


def parts_set(items):
    return {lam.parts for lam in items}


def test_partition_validation_and_statistics():
    lam = Partition((3, 2, 1, 1))
    assert lam.size == 7
    assert lam.length == 4
    assert lam.ones == 2
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, 0))
    empty = Partition()
    assert empty.size == 0 and empty.length == 0 and empty.ones == 0


def test_transpose_known_and_involutive():
    assert Partition((3, 1)).transpose() == Partition((2, 1, 1))
    assert Partition((2, 2)).transpose() == Partition((2, 2))
    assert Partition().transpose() == Partition()


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 9), max_size=8))
def test_transpose_is_an_involution(parts):
    lam = Partition(sorted(parts, reverse=True))
    assert lam.transpose().transpose() == lam
    assert lam.transpose().size == lam.size


def test_enumeration_examples():
    assert parts_set(partitions(lambda s, l, m1: m1 < 1, 2)) == {(), (2,)}
    assert parts_set(partitions(lambda s, l, m1: s == 3, 3)) == {
        (3,), (2, 1), (1, 1, 1)}
    assert parts_set(partitions(lambda s, l, m1: m1 < 2, 3)) == {
        (), (1,), (2,), (3,), (2, 1)}


def test_enumeration_order_and_uniqueness():
    got = [lam.parts for lam in partitions(lambda s, l, m1: True, 3)]
    assert got == [(3,), (2, 1), (2,), (1, 1, 1), (1, 1), (1,), ()]
    all4 = partitions(lambda s, l, m1: True, 4)
    assert len(all4) == len(set(all4)) == 12   # p(0)+...+p(4)


def test_m_poly_listed_values():
    assert m_poly(2, 2) == IntPoly((2, 2, 1))
    assert m_poly(0, 1) == IntPoly((1,))
    assert m_poly(3, 3) == IntPoly((3, 3, 3, 1))
    assert m_poly(1, 2) == IntPoly((2, 1))


def test_n_poly_listed_values():
    assert n_poly(1, 1) == IntPoly((1, 1))
    assert n_poly(3, 2) == IntPoly((2, 0, 1, 1))
    assert n_poly(2, 5) == IntPoly((3, 1, 1))


def test_bound_polynomials_shape_and_ordering():
    for delta in range(9):
        for r in range(1, 9):
            m = m_poly(delta, r)
            n = n_poly(delta, r)
            assert m.degree == delta and m.coeffs[-1] == 1
            assert n.degree == delta and n.coeffs[-1] == 1
            assert all(c >= 0 for c in m.coeffs)
            assert all(c >= 0 for c in n.coeffs)
            assert m(1) > 0 and n(1) > 0
            for x in (1, 2, 3, 5, 9):
                assert m(x) >= n(x)


def test_m_poly_stabilizes_past_delta():
    for delta in range(9):
        stable = m_poly(delta, delta + 1)
        for r in range(delta + 1, 13):
            assert m_poly(delta, r) == stable


def test_regular_ideal_count_polynomials():
    assert hilb_count_regular(0) == IntPoly((1,))
    assert hilb_count_regular(1) == IntPoly((1,))
    assert hilb_count_regular(2) == IntPoly((1, 1))
    assert hilb_count_regular(3) == IntPoly((1, 1, 1))
    assert hilb_count_regular(4) == IntPoly((1, 1, 2, 1))


def test_regular_ideal_count_at_one_is_partition_number():
    partition_numbers = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    for j, pj in enumerate(partition_numbers):
        assert hilb_count_regular(j)(1) == pj


def test_append_ones_bijection():
    # appending r ones maps partitions of j-r bijectively onto partitions
    # of j with at least r ones, preserving size - length
    for j in range(11):
        for r in range(1, 6):
            if j - r < 0:
                continue
            source = partitions(lambda s, l, m1: s == j - r, j - r)
            target = parts_set(partitions(lambda s, l, m1: s == j and m1 >= r, j))
            image = set()
            for mu in source:
                lam = tuple(sorted(mu.parts + (1,) * r, reverse=True))
                assert sum(lam) - len(lam) == mu.size - mu.length
                image.add(lam)
            assert len(image) == len(source)
            assert image == target
