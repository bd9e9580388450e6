"""Scheme B: modified signals plus per-subtype MDS compression.

Within a subtype block, the term of signal S meant for the user at node p
is dropped whenever that user can already read the packet ``W[d_p, S - p]``
from its own access set.  Each user of the subtype can rebuild a number
of (modified) signals from cache alone; at least ``h`` of them, where h is
the family's redundancy count, so the server sends the n signals through
an [n, n - h] MDS code instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .combinatorics import binom, signal_layout
from .demands import DemandMap
from .errors import CountingViolation, DecodeFailure, InvalidParameter, OracleRefused
from .geometry import GridConfig, NodeId, Regime, UserClass, UserSpec, enumerate_users, make_user, regime_classes
from .mds import MdsBlock, decode_positions, mds_encode
from .mn import CacheView, Placement, SignalBlock, SignalId, _xor_terms, decode_user, place, role_demand_array

ORACLE_LIMIT = 10_000

_FAMILY_CLASSES = {
    "II": (UserClass.II_1, UserClass.II_2),
    "III": (UserClass.III_1, UserClass.III_2, UserClass.III_3, UserClass.III_4),
    "IV": (UserClass.IV,),
}


def _family(cls) -> str:
    if isinstance(cls, UserClass):
        return cls.family
    fam = str(cls).split("-")[0]
    if fam not in ("I", "II", "III", "IV"):
        raise InvalidParameter(f"unknown family {cls!r}")
    return fam


@dataclass(frozen=True)
class RedundancyCount:
    family: str
    parts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.parts)


def h_formula(cls, K: int, t: int) -> RedundancyCount:
    """Guaranteed number of cache-reconstructible signals per user of a family.

    Part i counts signals containing the i-th access node but none of the
    earlier ones, whose remaining t nodes meet that node's other accessible
    nodes: C(K-i, t) - C(K-i-(s-1), t) for access size s.
    """
    fam = _family(cls)
    size = {"I": 1, "II": 2, "III": 3, "IV": 4}[fam]
    parts = tuple(binom(K - i, t) - binom(K - i - (size - 1), t) for i in range(1, size + 1)) if size > 1 else ()
    return RedundancyCount(fam, parts)


def h_for(cls: UserClass, K: int, t: int) -> int:
    return 0 if cls is UserClass.I else h_formula(cls, K, t).total


def subtype_access_masks(subtype: UserClass, grid: tuple[int, int]) -> np.ndarray:
    K1, K2 = grid
    return np.array(
        [make_user(subtype, NodeId(k1, k2), K1, K2).access_mask for k1 in range(K1) for k2 in range(K2)],
        dtype=np.int64,
    )


def kept_terms(subtype: UserClass, placement: Placement) -> np.ndarray:
    """kept[s, i] is False when member i of signal s can read its own term from cache."""
    layout = placement.layout
    masks = subtype_access_masks(subtype, placement.config.grid)
    return (layout.sub_mask & masks[layout.members]) == 0


def modified_signal_block(subtype: UserClass, demands, placement: Placement) -> SignalBlock:
    layout = placement.layout
    role_demands = role_demand_array(subtype, demands, placement)
    kept = kept_terms(subtype, placement)
    payloads = _xor_terms(placement, layout, role_demands, kept)
    return SignalBlock(subtype, layout, role_demands, payloads, kept, np.ones(layout.n_signals, dtype=bool))


def modified_signals(subtype: UserClass, demands, placement: Placement) -> list[tuple[SignalId, bytes]]:
    return modified_signal_block(subtype, demands, placement).items()


def reconstructible_index(access_mask: int, kept: np.ndarray, sub_mask: np.ndarray) -> np.ndarray:
    """Signals whose kept terms all index packets this access set can read."""
    ok = ~kept | ((sub_mask & access_mask) != 0)
    return np.nonzero(ok.all(axis=1))[0]


def reconstructible_signals(user: UserSpec, block: SignalBlock, placement: Placement | None = None) -> set[SignalId]:
    idx = reconstructible_index(user.access_mask, block.kept, block.layout.sub_mask)
    return {block.signal_id(int(s)) for s in idx}


def rebuild_from_cache(user: UserSpec, block: SignalBlock, placement: Placement, idx: np.ndarray) -> np.ndarray:
    """Payloads of signals ``idx`` computed from the user's retrievable packets only."""
    layout = block.layout
    view = CacheView(placement, user.access_mask)
    kept = block.kept[idx]
    files = block.role_demands[layout.members[idx]]
    terms = np.zeros(kept.shape + (placement.config.packet_bytes,), dtype=np.uint8)
    terms[kept] = view.read(files[kept], layout.sub_rank[idx][kept])
    return np.bitwise_xor.reduce(terms, axis=1)


def counted_parts(user: UserSpec, K: int, t: int) -> list[np.ndarray]:
    """The signal families the redundancy count is built from, by direct scan.

    Walk the access nodes in family order p1, p2, ...  Part i holds every
    (t+1)-subset S that contains p_i, avoids p_1..p_{i-1}, and whose other
    t nodes meet the rest of p_i's own access set (so the term for p_i is
    dropped and every other term is readable through p_i).
    """
    layout = signal_layout(K, t)
    if layout.n_signals == 0:
        return [np.zeros(0, dtype=np.int64) for _ in user.chain] if user.cls is not UserClass.I else []
    K1, K2 = user.grid
    S = layout.signals.mask_array
    parts, before = [], 0
    if user.cls is UserClass.I:
        return []
    for p in user.chain:
        bit = 1 << p.flat(K2)
        others = make_user(user.cls, p, K1, K2).access_mask & ~bit
        hit = ((S & bit) != 0) & ((S & before) == 0) & ((S & others) != 0)
        parts.append(np.nonzero(hit)[0])
        before |= bit
    return parts


@dataclass
class RedundancyCensus:
    family: str
    formula: RedundancyCount
    counted_min: int
    counted_max: int
    part_min: tuple[int, ...]
    measured_min: int
    measured_max: int


def redundancy_census(cls, K1: int, K2: int, t: int) -> RedundancyCensus:
    """Scan every user of a family on a K1 x K2 grid.

    Reports the chain-family counts (which must equal the closed form) and
    the full number of cache-reconstructible modified signals (which can be
    larger, since every droppable term is dropped).
    """
    fam = _family(cls)
    if fam == "I":
        raise InvalidParameter("Type I users have no redundancy")
    K = K1 * K2
    n = binom(K, t + 1)
    if n > ORACLE_LIMIT:
        raise OracleRefused(f"C({K},{t + 1}) = {n} signals exceeds the oracle limit {ORACLE_LIMIT}; use a smaller grid or t")
    layout = signal_layout(K, t)
    mn_cfg_grid = (K1, K2)
    counted, measured, part_counts = [], [], []
    for sub in _FAMILY_CLASSES[fam]:
        masks = subtype_access_masks(sub, mn_cfg_grid)
        kept = (layout.sub_mask & masks[layout.members]) == 0 if n else np.zeros((0, t + 1), bool)
        for k1 in range(K1):
            for k2 in range(K2):
                user = make_user(sub, NodeId(k1, k2), K1, K2)
                rec = reconstructible_index(user.access_mask, kept, layout.sub_mask)
                parts = counted_parts(user, K, t)
                union = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
                if len(np.unique(union)) != len(union):
                    raise CountingViolation(f"counted families overlap for {user.key}")
                if not np.isin(union, rec).all():
                    raise CountingViolation(f"a counted signal is not reconstructible for {user.key}")
                counted.append(len(union))
                part_counts.append(tuple(len(p) for p in parts))
                measured.append(len(rec))
    part_min = tuple(int(v) for v in np.min(np.array(part_counts), axis=0))
    return RedundancyCensus(fam, h_formula(fam, K, t), min(counted), max(counted), part_min,
                            min(measured), max(measured))


def h_bruteforce(cls, K1: int, K2: int, t: int) -> int:
    """Minimum over users of the family of the directly scanned counted signals."""
    return redundancy_census(cls, K1, K2, t).counted_min


@dataclass
class SchemeBTranscript:
    plain: dict[UserClass, SignalBlock]
    coded: dict[UserClass, MdsBlock]
    modified: dict[UserClass, SignalBlock]
    F: int
    demands: DemandMap
    h: dict[UserClass, int]
    measured_min: dict[UserClass, int] = field(default_factory=dict)
    decoded_users: int = 0

    @property
    def symbols_per_subtype(self) -> dict[UserClass, int]:
        out = {cls: b.n for cls, b in self.plain.items()}
        out.update({cls: b.k for cls, b in self.coded.items()})
        return out

    @property
    def total_symbols(self) -> int:
        return sum(self.symbols_per_subtype.values())

    @property
    def load(self) -> Fraction:
        return Fraction(self.total_symbols, self.F)


def run_scheme_b(config: GridConfig, demands: DemandMap, placement: Placement | None = None,
                 verify: bool = True, corrupt: tuple[UserClass, int] | None = None) -> SchemeBTranscript:
    """Encode every subtype block and, by default, decode for every user.

    Type I blocks (and any block whose redundancy is zero) go out uncoded.
    ``corrupt`` flips one bit of the given MDS symbol; it exists so the
    verification path can be exercised against a known-bad transmission.
    Users recover only the signals their own decoding needs.
    """
    placement = placement or place(config)
    K, t = config.K, config.t
    transcript = SchemeBTranscript({}, {}, {}, placement.F, demands, {})
    for cls in regime_classes(config.regime):
        h = h_for(cls, K, t)
        transcript.h[cls] = h
        if cls is UserClass.I or h == 0:
            transcript.plain[cls] = modified_signal_block(cls, demands, placement) if cls is not UserClass.I \
                else _plain_block(cls, demands, placement)
            continue
        block = modified_signal_block(cls, demands, placement)
        transcript.modified[cls] = block
        transcript.coded[cls] = mds_encode(block.payloads, h, subtype=cls)
    if corrupt is not None:
        cls, idx = corrupt
        if cls not in transcript.coded or not 0 <= idx < transcript.coded[cls].k:
            raise InvalidParameter(f"no MDS symbol {idx} for subtype {getattr(cls, 'value', cls)}")
        transcript.coded[cls].symbols[idx, 0] ^= 1
    if verify:
        _verify_b(config, placement, transcript)
    return transcript


def _plain_block(cls, demands, placement):
    from .mn import mn_signal_block

    return mn_signal_block(cls, demands, placement)


def _verify_b(config: GridConfig, placement: Placement, tr: SchemeBTranscript) -> None:
    layout = placement.layout
    for user in enumerate_users(config):
        want = placement.files[tr.demands[user]]
        if user.cls in tr.plain:
            got = decode_user(user, tr.plain[user.cls], placement)
        else:
            block, mds = tr.modified[user.cls], tr.coded[user.cls]
            rec = reconstructible_index(user.access_mask, block.kept, layout.sub_mask)
            h = tr.h[user.cls]
            if len(rec) < h:
                raise CountingViolation(f"user {user.key} reconstructs {len(rec)} < h = {h} signals")
            prev = tr.measured_min.get(user.cls)
            tr.measured_min[user.cls] = len(rec) if prev is None else min(prev, len(rec))
            need = _needed_signals(user, layout, placement)
            known = rebuild_from_cache(user, block, placement, rec)
            payloads = np.zeros_like(block.payloads)
            payloads[need] = decode_positions(mds, rec, known, wanted=need)
            present = np.zeros(block.n, dtype=bool)
            present[need] = True
            got = decode_user(user, block.with_payloads(payloads, present), placement)
        if not np.array_equal(got, want):
            raise DecodeFailure(f"user {user.key} decoded the wrong bytes")
        tr.decoded_users += 1


def _needed_signals(user: UserSpec, layout, placement: Placement) -> np.ndarray:
    """Signals X_{T + role} for every packet T the user cannot read."""
    sig, pos = np.nonzero(layout.members == user.role)
    T = layout.sub_rank[sig, pos]
    missing = ~placement.retrievable_mask(user.access_mask)[T]
    return np.sort(sig[missing])


def total_reduction(regime: Regime | str, K: int, t: int) -> int:
    return sum(h_for(cls, K, t) for cls in regime_classes(regime))


def load_b_from_counts(regime: Regime | str, K: int, t: int) -> Fraction:
    """(#subtypes * C(K, t+1) - H) / C(K, t)."""
    subtypes = len(regime_classes(regime))
    return Fraction(subtypes * binom(K, t + 1) - total_reduction(regime, K, t), binom(K, t))


def load_b_closed_form(regime: Regime | str, K: int, t: int) -> Fraction:
    """Scheme B load as a combination of binomials C(K-i, t).

    Expanding the per-family counts and C(K, t+1) = C(K-1, t+1) + C(K-1, t)
    gives, with Ci = C(K-i, t):
      min: 3 C(K-1, t+1) + C1 + 2 C3
      mid: 8 C(K-1, t+1) + C1 - 5 C2 + C3 + 4 C4 + 5 C5 + C6 + C7
      max: 7 C(K-1, t+1)      - 5 C2 + C3 + 4 C4 + 5 C5 + C6 + C7
    all over C(K, t).
    """
    if not 0 <= t <= K:
        raise InvalidParameter(f"t={t} outside [0, {K}]")
    regime = Regime.parse(regime)
    C = [binom(K - i, t) for i in range(8)]
    head = binom(K - 1, t + 1)
    if regime is Regime.MIN:
        num = 3 * head + C[1] + 2 * C[3]
    else:
        tail = -5 * C[2] + C[3] + 4 * C[4] + 5 * C[5] + C[6] + C[7]
        num = 8 * head + C[1] + tail if regime is Regime.MID else 7 * head + tail
    return Fraction(num, C[0])


def load_b_asymptotic(regime: Regime | str, m_over_n) -> float:
    """Large-K limit of the Scheme B load at memory ratio m = M/N."""
    m = float(Fraction(m_over_n))
    if not 0 <= m <= 1:
        raise InvalidParameter("M/N must lie in [0, 1]")
    if m == 0:
        return float("inf")
    q = 1 - m
    regime = Regime.parse(regime)
    if regime is Regime.MIN:
        return 3 * q * q / m + q + 2 * q ** 3
    lead = (8 / m - 6) if regime is Regime.MID else (7 / m - 6)
    first = 1 if regime is Regime.MID else 2
    return lead * q * q + 3 * q ** 4 + 4 * q ** 5 + sum(q ** i for i in range(first, 8))
