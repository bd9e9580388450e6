"""Scheme A: one MN delivery per user subtype present in the regime."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import binom
from .demands import DemandMap
from .errors import DecodeFailure, InvalidParameter
from .geometry import GridConfig, Regime, UserClass, enumerate_users, regime_classes
from .mn import Placement, SignalBlock, decode_user, mn_signal_block, place

SUBTYPES_PER_REGIME = {Regime.MIN: 3, Regime.MID: 8, Regime.MAX: 7}


@dataclass
class SchemeATranscript:
    blocks: dict[UserClass, SignalBlock]
    F: int
    demands: DemandMap
    decoded_users: int = 0

    @property
    def total_signals(self) -> int:
        return sum(b.n for b in self.blocks.values())

    @property
    def load(self) -> Fraction:
        return Fraction(self.total_signals, self.F)


def run_scheme_a(config: GridConfig, demands: DemandMap, placement: Placement | None = None,
                 verify: bool = True) -> SchemeATranscript:
    """Deliver to every user and (by default) check each decodes its file byte-exactly."""
    placement = placement or place(config)
    blocks = {cls: mn_signal_block(cls, demands, placement) for cls in regime_classes(config.regime)}
    transcript = SchemeATranscript(blocks, placement.F, demands)
    if verify:
        for user in enumerate_users(config):
            got = decode_user(user, blocks[user.cls], placement)
            want = placement.files[demands[user]]
            if not np.array_equal(got, want):
                raise DecodeFailure(f"user {user.key} decoded the wrong bytes")
            transcript.decoded_users += 1
    return transcript


def load_a(regime: Regime | str, K: int, t: int) -> Fraction:
    if not 0 <= t <= K:
        raise InvalidParameter(f"t={t} outside [0, {K}]")
    return SUBTYPES_PER_REGIME[Regime.parse(regime)] * Fraction(K - t, t + 1)


def load_a_asymptotic(regime: Regime | str, m_over_n) -> float:
    m = Fraction(m_over_n)
    if not 0 <= m <= 1:
        raise InvalidParameter("M/N must lie in [0, 1]")
    if m == 0:
        return math.inf
    return float(SUBTYPES_PER_REGIME[Regime.parse(regime)] * (1 / m) * (1 - m))


def signal_count_a(regime: Regime | str, K: int, t: int) -> int:
    return SUBTYPES_PER_REGIME[Regime.parse(regime)] * binom(K, t + 1)
