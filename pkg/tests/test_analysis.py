from __future__ import annotations

import math
from fractions import Fraction

import pytest

from udncache.analysis import (
    GAP_BOUNDS,
    LoadReport,
    formula_reports,
    gap_report,
    lambda_ratios,
    load_benchmark_d,
    load_benchmark_d_float,
    load_benchmark_d_literal,
    load_uncoded,
    ratio_b_over_a,
    reports_to_csv,
)
from udncache.errors import InvalidParameter, UndefinedRatio
from udncache.geometry import Regime
from udncache.scheme_a import load_a
from udncache.scheme_b import load_b_closed_form


def test_lambda_examples():
    lam = lambda_ratios(9, 2)
    assert lam[0] == Fraction(2, 9)
    assert lam[1] == Fraction(5, 12)
    assert lambda_ratios(12, 0) == (0, 0, 0, 0)
    assert lambda_ratios(12, 12) == (1, 1, 1, 1)


def test_lambdas_are_monotone():
    for K in range(1, 30):
        for t in range(0, K + 1):
            lam = lambda_ratios(K, t)
            assert 0 <= lam[0] <= lam[1] <= lam[2] <= lam[3] <= 1


def test_uncoded_examples():
    assert load_uncoded("mid", 9, 2) == 35
    assert load_uncoded("mid", 9, 9) == 0
    assert load_uncoded("min", 9, 0) == 27
    assert load_uncoded("max", 9, 0) == 63
    for regime in Regime:
        values = [load_uncoded(regime, 16, t) for t in range(17)]
        # strictly decreasing until it reaches zero
        assert all(a > b or a == b == 0 for a, b in zip(values, values[1:]))
    # without single-access users every file is fully readable one step early
    assert load_uncoded("max", 16, 15) == 0 < load_uncoded("mid", 16, 15)


@pytest.mark.parametrize("regime", list(Regime))
def test_benchmark_grouping_matches_literal_sum(regime):
    for K in (9, 12, 16, 20):
        for t in range(0, K + 1):
            assert load_benchmark_d(regime, K, t) == load_benchmark_d_literal(regime, K, t)
            assert load_benchmark_d_float(regime, K, t) == pytest.approx(float(load_benchmark_d(regime, K, t)))


def test_benchmark_examples():
    lam1 = Fraction(2, 9)
    first = (1 / lam1 - 1) * (1 - (1 - lam1) ** 9)
    assert load_benchmark_d("mid", 9, 2) > first
    assert load_benchmark_d("min", 9, 2) - first < Fraction(1, 2)
    assert load_benchmark_d("mid", 9, 0) == 72
    assert load_benchmark_d("mid", 9, 9) == 0


def test_gap_report_large_grid():
    K = 400
    rep = gap_report(K, K // 3)
    assert abs(rep[Regime.MID].ratio_a_over_d / 8 - 1) < 0.1
    assert rep[Regime.MIN].bound == 18
    assert GAP_BOUNDS[Regime.MID] == 48
    with pytest.raises(InvalidParameter):
        gap_report(9, 0)


def test_ratio_b_over_a_examples():
    assert ratio_b_over_a("min", 1) == pytest.approx(1 / 3)
    assert ratio_b_over_a("mid", 1e-3) == pytest.approx(1, abs=1e-3)
    for regime in Regime:
        for m in (0.01, 0.1, 0.3, 0.5, 0.9, 0.999):
            assert 0 < ratio_b_over_a(regime, m) <= 1
    assert ratio_b_over_a("mid", 1) == pytest.approx(1 / 8)
    # both loads vanish at full memory; without Type I users B vanishes faster
    assert ratio_b_over_a("max", 1) == 0
    with pytest.raises(UndefinedRatio):
        ratio_b_over_a("mid", 0)


def test_ratio_matches_large_grid_loads():
    K = 10_000
    t = K // 3
    m = Fraction(t, K)
    for regime in Regime:
        finite = load_b_closed_form(regime, K, t) / load_a(regime, K, t)
        assert abs(float(finite) / ratio_b_over_a(regime, m) - 1) < 0.01


def test_load_ordering():
    for regime in Regime:
        for K in (9, 12, 16, 25, 36):
            for t in range(1, K):
                assert load_b_closed_form(regime, K, t) < load_a(regime, K, t)
                if regime is not Regime.MAX:
                    assert load_a(regime, K, t) < load_uncoded(regime, K, t)


def test_uncoded_beats_scheme_a_at_high_memory_without_single_access_users():
    # every Max-regime user reads at least lambda_2 of its file, so unicasting
    # the remainder eventually costs less than seven MN deliveries
    assert load_a("max", 9, 6) == 3
    assert load_uncoded("max", 9, 6) == Fraction(27, 14)
    for K in (9, 12, 16, 36):
        bad = [t for t in range(1, K) if load_a("max", K, t) >= load_uncoded("max", K, t)]
        assert bad and bad == list(range(bad[0], K))
        assert bad[0] > K // 2
        assert all(load_a("max", K, t) < load_uncoded("max", K, t) for t in range(1, 4))


def test_report_rows():
    rows = formula_reports("mid", 3, 3, 2, ["A", "B", "uncoded", "benchmark_D", "MN"])
    csv_text = reports_to_csv(rows)
    lines = csv_text.strip().split("\n")
    assert lines[0] == "regime,K1,K2,t,scheme,load_num,load_den,load_float,asymptotic"
    for line in lines[1:]:
        f = line.split(",")
        assert float(f[7]) == float(Fraction(int(f[5]), int(f[6])))
    assert lines[1].startswith("mid,3,3,2,A,56,3,")
    assert LoadReport(Regime.MIN, 3, 3, 1, "A", Fraction(1, 3)).to_json()["asymptotic"] == ""
    with pytest.raises(InvalidParameter):
        formula_reports("mid", 3, 3, 2, ["Z"])
