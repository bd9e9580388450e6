from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from grid3_data import GRID3_ACCESS
from udncache.errors import InvalidParameter, UnsupportedMemoryPoint
from udncache.geometry import (
    GridConfig,
    NodeId,
    Regime,
    UserClass,
    classify_point,
    enumerate_users,
    make_user,
    mod_dist_1d,
    mod_dist_2d,
    region_census,
    shape_of,
    user_count,
    witness_point,
)


def test_mod_dist_1d_examples():
    assert mod_dist_1d(0, 2, 3) == 1
    assert mod_dist_1d(4, 4, 7) == 0
    assert mod_dist_1d(1, 6, 8) == 3
    assert mod_dist_1d(6, 1, 8) == 3


def test_mod_dist_1d_rejects_bad_modulus():
    with pytest.raises(InvalidParameter):
        mod_dist_1d(0, 0, 0)


@given(st.integers(1, 30).flatmap(lambda K: st.tuples(st.just(K), st.integers(0, K - 1), st.integers(0, K - 1),
                                                     st.integers(0, K - 1))))
def test_mod_dist_1d_is_a_metric(args):
    K, a, b, c = args
    assert mod_dist_1d(a, b, K) == mod_dist_1d(b, a, K)
    assert mod_dist_1d(a, c, K) <= mod_dist_1d(a, b, K) + mod_dist_1d(b, c, K)
    assert mod_dist_1d(a, b, K) <= K // 2
    # brute force: walk both ways round the cycle
    steps = next(s for s in range(K) if (a + s) % K == b or (a - s) % K == b)
    assert mod_dist_1d(a, b, K) == steps


def test_mod_dist_2d_examples():
    assert mod_dist_2d((0.5, 0.0), NodeId(1, 0), 3, 3) == pytest.approx(0.5)
    assert mod_dist_2d((2.0, 1.0), NodeId(2, 1), 3, 3) == 0
    assert mod_dist_2d((0.5, 0.5), NodeId(1, 1), 3, 3) == pytest.approx(math.sqrt(0.5))
    # wraparound: the point just below row 0 is close to row K1-1
    assert mod_dist_2d((-0.25, 0.0), NodeId(2, 0), 3, 3) == pytest.approx(0.75)


def test_classify_point_examples():
    r = 0.8
    assert classify_point(NodeId(0, 0), (1 - r) / 2, (1 - r) / 2, r, 3, 3) == (NodeId(0, 0),)
    assert classify_point(NodeId(0, 0), 0, 0.5, r, 3, 3) == (NodeId(0, 0), NodeId(0, 1))
    assert classify_point(NodeId(0, 0), 0.5, 0.5, r, 3, 3) == (
        NodeId(0, 0), NodeId(0, 1), NodeId(1, 0), NodeId(1, 1))


def test_classify_point_rejects_radius():
    with pytest.raises(InvalidParameter):
        classify_point(NodeId(0, 0), 0, 0, 0.5, 3, 3)


@pytest.mark.parametrize("regime", list(Regime))
@pytest.mark.parametrize("K1", [3, 4, 5, 6])
@pytest.mark.parametrize("K2", [3, 4, 5, 6])
def test_enumeration_size(regime, K1, K2):
    users = enumerate_users(GridConfig(K1, K2, regime))
    assert len(users) == user_count(regime, K1, K2)
    assert len({(u.cls, u.anchor) for u in users}) == len(users)


def test_user_count_examples():
    assert user_count("mid", 3, 3) == 72
    assert user_count("min", 3, 3) == 27
    assert user_count("max", 4, 5) == 140
    assert len(enumerate_users(GridConfig(3, 4, "max"))) == 84


def test_three_by_three_access_sets_match_table():
    users = enumerate_users(GridConfig(3, 3, "mid"))
    assert len(users) == 72
    for u in users:
        assert u.anchor in u.access
        assert len(u.access) == u.cls.size
        if u.cls is UserClass.I:
            assert u.access == (u.anchor,)
            continue
        expected = GRID3_ACCESS[u.cls.value][tuple(u.anchor)]
        assert set(u.access) == {NodeId(*n) for n in expected}


def test_mid_access_sets_pairwise_distinct():
    for K1, K2 in [(3, 3), (3, 5), (4, 4), (6, 5)]:
        sets = [frozenset(u.access) for u in enumerate_users(GridConfig(K1, K2, "mid"))]
        assert len(set(sets)) == len(sets)


def test_access_sets_sorted_canonically():
    for u in enumerate_users(GridConfig(4, 3, "mid")):
        assert list(u.access) == sorted(u.access)


@pytest.mark.parametrize("r", [0.75, 0.8, 0.9, 0.95])
def test_witness_points_reproduce_access_sets_mid(r):
    for u in enumerate_users(GridConfig(4, 5, "mid")):
        x, y = witness_point(u.cls, r)
        assert classify_point(u.anchor, x, y, r, 4, 5) == u.access


def test_witness_points_at_regime_edges():
    r = math.sqrt(2) / 2
    for u in enumerate_users(GridConfig(3, 4, "min")):
        x, y = witness_point(u.cls, r)
        assert classify_point(u.anchor, x, y, r, 3, 4) == u.access
    for u in enumerate_users(GridConfig(4, 3, "max")):
        x, y = witness_point(u.cls, 1.0)
        assert classify_point(u.anchor, x, y, 1.0, 4, 3) == u.access


def test_grid_config_validation():
    with pytest.raises(InvalidParameter):
        GridConfig(2, 3)
    with pytest.raises(InvalidParameter):
        GridConfig(3, 3, t=10)
    with pytest.raises(InvalidParameter):
        GridConfig(3, 3, regime="huge")
    with pytest.raises(InvalidParameter):
        GridConfig(3, 3, "mid", r=1.0)
    assert GridConfig(3, 3, "max", r=1.0).n_files == 63


def test_memory_point_must_be_integral():
    cfg = GridConfig.from_memory(3, 3, 16, 72)
    assert cfg.t == 2
    with pytest.raises(UnsupportedMemoryPoint):
        GridConfig.from_memory(3, 3, 1, 72)


def test_shape_identification():
    for cls in UserClass:
        shifted = [(a + 5, b - 2) for a, b in cls.offsets]
        assert shape_of(shifted) is cls
    assert shape_of([(0, 0), (1, 1)]) is None


def test_census_mid_has_all_eight_shapes():
    census = region_census(0.8, 100_000, seed=1)
    assert set(census) == {c.value for c in UserClass}
    assert sum(e["area_fraction"] for e in census.values()) == pytest.approx(1.0)
    assert all(e["count"] > 0 for e in census.values())


def test_census_edges():
    low = region_census(math.sqrt(2) / 2, 100_000, seed=2)
    assert set(low) == {"I", "II-1", "II-2"}
    high = region_census(1.0, 100_000, seed=3)
    assert "I" not in high
    assert all(not name.startswith("other") for name in high)


def test_census_is_reproducible_and_validated():
    assert region_census(0.85, 5000, seed=4) == region_census(0.85, 5000, seed=4)
    with pytest.raises(InvalidParameter):
        region_census(0.8, 0)


def test_make_user_wraps():
    u = make_user(UserClass.III_4, NodeId(0, 0), 3, 4)
    assert set(u.access) == {NodeId(0, 0), NodeId(0, 3), NodeId(2, 0)}
    assert u.chain == (NodeId(0, 0), NodeId(0, 3), NodeId(2, 0))
