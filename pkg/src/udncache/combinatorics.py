"""Binomials and colexicographic subset indexing.

Subsets of the flattened node universe ``[0, K)`` are handled either as
sorted tuples or as integer bitmasks.  The colex rank of a sorted subset
``s_0 < s_1 < ... < s_{c-1}`` is ``sum(C(s_i, i + 1))``.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParameter


def binom(n: int, k: int) -> int:
    """Binomial coefficient that evaluates to 0 outside ``0 <= k <= n``."""
    if n < 0 or k < 0 or k > n:
        return 0
    return comb(n, k)


def subset_rank(subset: Iterable[int], universe_size: int, cardinality: int | None = None) -> int:
    items = sorted(subset)
    if cardinality is not None and len(items) != cardinality:
        raise InvalidParameter(f"subset has {len(items)} elements, expected {cardinality}")
    if len(set(items)) != len(items):
        raise InvalidParameter("subset has repeated elements")
    if items and (items[0] < 0 or items[-1] >= universe_size):
        raise InvalidParameter(f"subset element outside [0, {universe_size})")
    return sum(comb(s, i + 1) for i, s in enumerate(items))


def subset_unrank(rank: int, universe_size: int, cardinality: int) -> tuple[int, ...]:
    total = binom(universe_size, cardinality)
    if not 0 <= rank < total:
        raise InvalidParameter(f"rank {rank} outside [0, {total})")
    out = []
    n = universe_size - 1
    for i in range(cardinality, 0, -1):
        # largest n with C(n, i) <= rank
        while comb(n, i) > rank:
            n -= 1
        out.append(n)
        rank -= comb(n, i)
        n -= 1
    return tuple(reversed(out))


def mask_of(subset: Iterable[int]) -> int:
    m = 0
    for s in subset:
        m |= 1 << s
    return m


class SubsetTable:
    """All ``c``-subsets of ``[0, K)`` in colex order, with bitmasks.

    For ``K <= 62`` the masks are also available as an int64 array so that
    intersection tests vectorise.
    """

    def __init__(self, universe_size: int, cardinality: int):
        self.universe_size = universe_size
        self.cardinality = cardinality
        subsets = list(combinations(range(universe_size), cardinality))
        subsets.sort(key=lambda s: s[::-1])
        self.subsets: list[tuple[int, ...]] = subsets
        self.masks: list[int] = [mask_of(s) for s in subsets]
        self.mask_array = np.array(self.masks, dtype=np.int64) if universe_size <= 62 else None
        self.members = (
            np.array(subsets, dtype=np.int64).reshape(len(subsets), cardinality)
        )

    def __len__(self) -> int:
        return len(self.subsets)

    def rank(self, subset: Sequence[int]) -> int:
        return subset_rank(subset, self.universe_size, self.cardinality)


MAX_TABLE = 1_000_000


@lru_cache(maxsize=64)
def subset_table(universe_size: int, cardinality: int) -> SubsetTable:
    if universe_size > 62:
        raise InvalidParameter("simulation supports at most 62 cache nodes")
    size = binom(universe_size, cardinality)
    if size > MAX_TABLE:
        raise InvalidParameter(
            f"C({universe_size},{cardinality}) = {size} subsets is too many to simulate (limit {MAX_TABLE})"
        )
    return SubsetTable(universe_size, cardinality)


class SignalLayout:
    """Index arrays linking (t+1)-subsets to their t-subsets.

    ``members[s, i]`` is the i-th node of signal subset ``s`` and
    ``sub_rank[s, i]`` is the colex rank of ``s`` with that node removed.
    ``sub_mask[s, i]`` is the matching bitmask.
    """

    def __init__(self, universe_size: int, t: int):
        self.universe_size = universe_size
        self.t = t
        self.packets = subset_table(universe_size, t)
        self.signals = subset_table(universe_size, t + 1) if t < universe_size else None
        n = len(self.signals) if self.signals is not None else 0
        self.members = np.zeros((n, t + 1), dtype=np.int64)
        self.sub_rank = np.zeros((n, t + 1), dtype=np.int64)
        self.sub_mask = np.zeros((n, t + 1), dtype=np.int64)
        if n:
            members = self.signals.members
            self.members[:] = members
            full = self.signals.mask_array
            # colex rank of S minus its i-th element: elements before i keep
            # their position, elements after i shift down one position
            ranks = np.zeros((n, t + 1), dtype=np.int64)
            binom_table = np.array(
                [[binom(v, j) for j in range(t + 2)] for v in range(universe_size)], dtype=object
            )
            for i in range(t + 1):
                total = np.zeros(n, dtype=object)
                for j in range(t + 1):
                    if j == i:
                        continue
                    pos = j if j < i else j - 1
                    total = total + binom_table[members[:, j], pos + 1]
                ranks[:, i] = total.astype(np.int64)
                self.sub_mask[:, i] = full & ~(np.int64(1) << members[:, i])
            self.sub_rank[:] = ranks

    @property
    def n_signals(self) -> int:
        return self.members.shape[0]

    @property
    def n_packets(self) -> int:
        return len(self.packets)


@lru_cache(maxsize=32)
def signal_layout(universe_size: int, t: int) -> SignalLayout:
    if not 0 <= t <= universe_size:
        raise InvalidParameter(f"t={t} outside [0, {universe_size}]")
    return SignalLayout(universe_size, t)
