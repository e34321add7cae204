from itertools import product

import pytest
from hypothesis import given, strategies as st

from mram.word import bitlen, bits, blockmask, digitmask, ones, popcount, replicate


def digit_set(g, p, a, D):
    return {i for i in range(g**D) if (i // g**p) % g == a}


def as_set(w):
    return set(bits(w))


@pytest.mark.parametrize("w, expected", [(0, 1), (1, 1), (42, 6), (2**100, 101)])
def test_bitlen(w, expected):
    assert bitlen(w) == expected


def test_bitlen_rejects_negative():
    with pytest.raises(ValueError):
        bitlen(-1)


def test_replicate_examples():
    assert replicate(0b101, 3, 2) == 45
    assert replicate(0b110, 3, 1) == 0b110
    # term-by-term sum: 1 + 4 + 16 + 64
    assert replicate(0b1, 2, 4) == sum(1 << (2 * i) for i in range(4)) == 85
    assert replicate(7, 3, 0) == 0


def test_replicate_precondition():
    with pytest.raises(ValueError):
        replicate(8, 3, 2)


@given(st.integers(0, 2**12 - 1), st.integers(12, 20), st.integers(0, 70))
def test_replicate_matches_sum(pattern, width, count):
    expected = sum(pattern << (i * width) for i in range(count))
    got = replicate(pattern, width, count)
    assert got == expected
    assert got.bit_length() <= width * count


def test_blockmask_examples():
    assert blockmask(0, 3) == 7
    assert blockmask(2, 1) == 4
    assert blockmask(4, 4) == sum(1 << i for i in range(4, 8)) == 240
    assert blockmask(5, 0) == 0


@given(st.integers(0, 200), st.integers(0, 100), st.integers(0, 200), st.integers(0, 100))
def test_disjoint_blocks_do_not_overlap(b1, l1, b2, l2):
    if b1 + l1 <= b2 or b2 + l2 <= b1:
        assert blockmask(b1, l1) & blockmask(b2, l2) == 0


def test_digitmask_examples():
    assert digitmask(3, 0, 0, 1) == 1
    assert digitmask(2, 0, 1, 2) == 10
    assert as_set(10) == digit_set(2, 0, 1, 2) == {1, 3}
    assert digitmask(2, 1, 0, 2) == 3
    assert digit_set(2, 1, 0, 2) == {0, 1}


def test_digitmask_is_replicated_block():
    for g, D in [(2, 4), (3, 3), (4, 2)]:
        for p in range(D):
            for a in range(g):
                expect = replicate(blockmask(a * g**p, g**p), g ** (p + 1), g ** (D - p - 1))
                assert digitmask(g, p, a, D) == expect


def test_digitmask_rejects_bad_digit():
    with pytest.raises(ValueError):
        digitmask(2, 0, 2, 1)
    with pytest.raises(ValueError):
        digitmask(2, 1, 0, 1)


def test_ones_and_popcount():
    for k in range(0, 40):
        assert ones(k) == (1 << k) - 1
        assert popcount(ones(k)) == k


def test_small_digitmasks_partition_the_universe():
    for g, D in product((2, 3), (1, 2, 3)):
        for p in range(D):
            total = 0
            for a in range(g):
                m = digitmask(g, p, a, D)
                assert total & m == 0
                total |= m
            assert total == (1 << g**D) - 1
