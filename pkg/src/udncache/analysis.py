"""Closed-form loads, baselines and comparison ratios."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

from .combinatorics import binom
from .errors import InvalidParameter, UndefinedRatio
from .geometry import Regime, UserClass, regime_classes
from .scheme_a import load_a, load_a_asymptotic
from .scheme_b import load_b_asymptotic, load_b_closed_form

CSV_HEADER = ["regime", "K1", "K2", "t", "scheme", "load_num", "load_den", "load_float", "asymptotic"]

# multiplicative gap constants quoted for large grids (6 x users per node)
GAP_BOUNDS = {Regime.MIN: 18, Regime.MID: 48, Regime.MAX: 42}

_ACCESS_SIZE = {"I": 1, "II": 2, "III": 3, "IV": 4}


def _check_t(K: int, t: int) -> None:
    if not 0 <= t <= K:
        raise InvalidParameter(f"t={t} outside [0, {K}]")


def lambda_ratios(K: int, t: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Fraction of every file a user reaching 1, 2, 3 or 4 nodes can read from cache.

    lambda_s = 1 - (K-t)(K-t-1)...(K-t-s+1) / (K(K-1)...(K-s+1)).
    """
    _check_t(K, t)
    out = []
    for s in range(1, 5):
        num = den = 1
        for i in range(s):
            num *= K - t - i
            den *= K - i
        out.append(1 - Fraction(num, den) if den else Fraction(1))
    return tuple(out)


def _memory_profile(regime: Regime | str, K: int, t: int) -> list[tuple[Fraction, int]]:
    """(lambda, number of users) groups for a regime, ascending in lambda."""
    lam = lambda_ratios(K, t)
    groups: dict[int, int] = {}
    for cls in regime_classes(regime):
        size = _ACCESS_SIZE[cls.family]
        groups[size] = groups.get(size, 0) + K
    return [(lam[s - 1], groups[s]) for s in sorted(groups)]


def load_uncoded(regime: Regime | str, K: int, t: int) -> Fraction:
    """Every user fetches the part of its file it cannot read from cache."""
    return sum((count * (1 - lam) for lam, count in _memory_profile(regime, K, t)), Fraction(0))


def load_benchmark_d(regime: Regime | str, K: int, t: int) -> Fraction:
    """Heterogeneous-memory benchmark sum_i prod_{j<=i} (1 - lambda_j), grouped.

    A group of c users with ratio lam contributes
    P * (1/lam - 1) * (1 - (1-lam)^c), P being the product over earlier groups.
    """
    _check_t(K, t)
    total = Fraction(0)
    prefix = Fraction(1)
    for lam, count in _memory_profile(regime, K, t):
        q = 1 - lam
        if lam == 0:
            total += prefix * count
        else:
            total += prefix * (1 / lam - 1) * (1 - q ** count)
        prefix *= q ** count
    return total


def load_benchmark_d_literal(regime: Regime | str, K: int, t: int) -> Fraction:
    """The same sum evaluated one user at a time."""
    total = Fraction(0)
    prod = Fraction(1)
    for lam, count in _memory_profile(regime, K, t):
        for _ in range(count):
            prod *= 1 - lam
            total += prod
    return total


def load_benchmark_d_float(regime: Regime | str, K: int, t: int) -> float:
    total, logprefix = 0.0, 0.0
    for lam, count in _memory_profile(regime, K, t):
        lam = float(lam)
        if lam >= 1:
            break
        if lam == 0:
            total += math.exp(logprefix) * count
            continue
        lq = math.log1p(-lam)
        total += math.exp(logprefix) * (1 / lam - 1) * -math.expm1(count * lq)
        logprefix += count * lq
    return total


def load_d_asymptotic(K: int, t: int) -> float:
    lam1 = Fraction(t, K)
    if lam1 == 0:
        return math.inf
    return float(1 / lam1 - 1)


@dataclass
class GapEntry:
    regime: Regime
    ratio_a_over_d: float
    six_ratio: float
    bound: int

    @property
    def within_bound(self) -> bool:
        return self.six_ratio <= self.bound


def gap_report(K: int, t: int) -> dict[Regime, GapEntry]:
    """R_A / R_D per regime, next to the large-grid gap constants.

    Values are reported, not asserted: the constants are limits.
    """
    if t < 1:
        raise InvalidParameter("gap report needs t >= 1")
    out = {}
    for regime in Regime:
        ra = float(load_a(regime, K, t))
        rd = load_benchmark_d_float(regime, K, t)
        ratio = ra / rd if rd else math.inf
        out[regime] = GapEntry(regime, ratio, 6 * ratio, GAP_BOUNDS[regime])
    return out


def ratio_b_over_a(regime: Regime | str, m_over_n) -> float:
    """Large-K ratio of the Scheme B load to the Scheme A load."""
    m = float(Fraction(m_over_n))
    if m <= 0:
        raise UndefinedRatio("the B/A ratio is undefined at M/N = 0")
    if m > 1:
        raise InvalidParameter("M/N must not exceed 1")
    regime = Regime.parse(regime)
    q = 1 - m
    if regime is Regime.MIN:
        return 1 + (2 * m / 3) * (q * q - 1)
    if regime is Regime.MID:
        inner = (8 / m - 6) * q + 3 * q ** 3 + 4 * q ** 4 + sum(q ** i for i in range(0, 7))
        return m / 8 * inner
    inner = (7 / m - 6) * q + 3 * q ** 3 + 4 * q ** 4 + sum(q ** i for i in range(1, 7))
    return m / 7 * inner


@dataclass(frozen=True)
class LoadReport:
    regime: Regime
    K1: int
    K2: int
    t: int
    scheme: str
    load: Fraction
    asymptotic: float | None = None

    @property
    def load_float(self) -> float:
        return float(self.load)

    def row(self) -> list[str]:
        asym = "" if self.asymptotic is None else repr(float(self.asymptotic))
        return [self.regime.value, str(self.K1), str(self.K2), str(self.t), self.scheme,
                str(self.load.numerator), str(self.load.denominator), repr(self.load_float), asym]

    def to_json(self) -> dict:
        return dict(zip(CSV_HEADER, self.row()))


def reports_to_csv(reports: list[LoadReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def formula_reports(regime: Regime | str, K1: int, K2: int, t: int, schemes=("A", "B", "uncoded")) -> list[LoadReport]:
    """Closed-form rows only (no simulation); used by sweeps."""
    regime = Regime.parse(regime)
    K = K1 * K2
    m = Fraction(t, K)
    out = []
    for scheme in schemes:
        if scheme == "A":
            out.append(LoadReport(regime, K1, K2, t, "A", load_a(regime, K, t), load_a_asymptotic(regime, m)))
        elif scheme == "B":
            out.append(LoadReport(regime, K1, K2, t, "B", load_b_closed_form(regime, K, t), load_b_asymptotic(regime, m)))
        elif scheme == "uncoded":
            out.append(LoadReport(regime, K1, K2, t, "uncoded", load_uncoded(regime, K, t)))
        elif scheme == "benchmark_D":
            out.append(LoadReport(regime, K1, K2, t, "benchmark_D", load_benchmark_d(regime, K, t), load_d_asymptotic(K, t)))
        elif scheme == "MN":
            out.append(LoadReport(regime, K1, K2, t, "MN", Fraction(K - t, t + 1)))
        else:
            raise InvalidParameter(f"unknown scheme {scheme!r}")
    return out
