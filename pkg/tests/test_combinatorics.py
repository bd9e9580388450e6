from __future__ import annotations

from itertools import combinations
from math import comb

import pytest
from hypothesis import given, strategies as st

from udncache.combinatorics import binom, signal_layout, subset_rank, subset_table, subset_unrank
from udncache.errors import InvalidParameter


def test_binom_is_zero_outside_range():
    assert binom(5, 2) == 10
    assert binom(-1, 2) == 0
    assert binom(3, 5) == 0
    assert binom(4, -1) == 0
    assert binom(0, 0) == 1


def test_rank_of_empty_and_minimal_subsets():
    assert subset_rank((), 9, 0) == 0
    assert subset_rank((0, 1), 9, 2) == 0


def test_rank_unrank_bijection_on_nine_choose_three():
    seen = set()
    for subset in combinations(range(9), 3):
        r = subset_rank(subset, 9, 3)
        assert subset_unrank(r, 9, 3) == subset
        seen.add(r)
    assert seen == set(range(84))


def test_colex_order_matches_table():
    table = subset_table(7, 3)
    for r, s in enumerate(table.subsets):
        assert subset_rank(s, 7, 3) == r


@given(st.integers(1, 20).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(0, n - 1)))))
def test_rank_roundtrip_random(args):
    n, items = args
    s = tuple(sorted(items))
    r = subset_rank(s, n, len(s))
    assert 0 <= r < comb(n, len(s))
    assert subset_unrank(r, n, len(s)) == s


def test_rank_errors():
    with pytest.raises(InvalidParameter):
        subset_unrank(84, 9, 3)
    with pytest.raises(InvalidParameter):
        subset_unrank(-1, 9, 3)
    with pytest.raises(InvalidParameter):
        subset_rank((0, 9), 9, 2)
    with pytest.raises(InvalidParameter):
        subset_rank((1, 2), 9, 3)


@pytest.mark.parametrize("K,t", [(9, 0), (9, 2), (12, 3), (6, 6), (5, 1)])
def test_signal_layout_sub_ranks(K, t):
    layout = signal_layout(K, t)
    assert layout.n_packets == comb(K, t)
    assert layout.n_signals == binom(K, t + 1)
    for s, S in enumerate(layout.signals.subsets if layout.signals else []):
        for i, p in enumerate(S):
            rest = tuple(v for v in S if v != p)
            assert layout.members[s, i] == p
            assert layout.sub_rank[s, i] == subset_rank(rest, K, t)
            assert layout.sub_mask[s, i] == sum(1 << v for v in rest)
