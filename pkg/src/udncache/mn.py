"""Shared-link MN coded caching kernel on a flattened node universe.

The grid schemes call into this module with the user anchored at node
``k`` playing MN user ``k``.  Nodes are referred to by their flat index
``k1 * K2 + k2`` throughout.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .combinatorics import SignalLayout, binom, signal_layout
from .errors import DecodeFailure, IncompleteDemand, InvalidParameter
from .geometry import GridConfig, NodeId, UserClass, UserSpec


class PacketId(NamedTuple):
    file: int
    subset: tuple[int, ...]


class SignalId(NamedTuple):
    subtype: UserClass | None
    subset: tuple[int, ...]


@dataclass(frozen=True)
class MNConfig:
    """Parameters of a plain MN system with ``num_nodes`` caches/users."""

    num_nodes: int
    t: int
    n_files: int
    packet_bytes: int = 64
    seed: int = 0
    grid: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.num_nodes < 1:
            raise InvalidParameter("need at least one node")
        if not 0 <= self.t <= self.num_nodes:
            raise InvalidParameter(f"t={self.t} outside [0, {self.num_nodes}]")
        if self.n_files < 1 or self.packet_bytes < 1:
            raise InvalidParameter("n_files and packet_bytes must be positive")


def as_mn_config(config: GridConfig | MNConfig) -> MNConfig:
    if isinstance(config, MNConfig):
        return config
    return MNConfig(config.K, config.t, config.n_files, config.packet_bytes, config.seed, (config.K1, config.K2))


def line_user(k: int, num_nodes: int) -> UserSpec:
    """A single-access user at node ``k`` of a 1 x K line (plain MN user)."""
    node = NodeId(0, k)
    return UserSpec(UserClass.I, node, (node,), (1, num_nodes))


class Placement:
    """Cache contents: node ``k`` stores ``W[n, T]`` for every file and every T containing k."""

    def __init__(self, config: MNConfig, files: np.ndarray):
        self.config = config
        self.layout: SignalLayout = signal_layout(config.num_nodes, config.t)
        self.files = files
        self.files.setflags(write=False)

    @property
    def F(self) -> int:
        return self.layout.n_packets

    def node_packet_ranks(self, node: int) -> np.ndarray:
        masks = self.layout.packets.mask_array
        return np.nonzero(masks & (1 << node))[0]

    def node_packets(self, node: int) -> list[PacketId]:
        subsets = self.layout.packets.subsets
        ranks = self.node_packet_ranks(node)
        return [PacketId(n, subsets[r]) for n in range(self.config.n_files) for r in ranks]

    def retrievable_mask(self, access_mask: int) -> np.ndarray:
        """Boolean mask over packet ranks a user with this access mask can read."""
        return (self.layout.packets.mask_array & access_mask) != 0

    def digest(self) -> list[dict]:
        rows = []
        for node in range(self.config.num_nodes):
            ranks = self.node_packet_ranks(node)
            h = hashlib.sha256(np.ascontiguousarray(self.files[:, ranks]).tobytes()).hexdigest()
            rows.append({"node": node, "packet_count": int(len(ranks)) * self.config.n_files, "payload_hash": h})
        return rows


class CacheView:
    """Read-only window onto the packets one user can retrieve from its access set."""

    def __init__(self, placement: Placement, access_mask: int):
        self.placement = placement
        self.retrievable = placement.retrievable_mask(access_mask)

    def read(self, files: np.ndarray, ranks: np.ndarray) -> np.ndarray:
        ranks = np.asarray(ranks)
        bad = ~self.retrievable[ranks]
        if bad.any():
            subsets = self.placement.layout.packets.subsets
            missing = [PacketId(int(f), subsets[int(r)]) for f, r in zip(np.broadcast_to(files, ranks.shape)[bad], ranks[bad])]
            raise DecodeFailure("decoder touched a packet outside its access set", missing)
        return self.placement.files[files, ranks]


def place(config: GridConfig | MNConfig) -> Placement:
    mn = as_mn_config(config)
    layout = signal_layout(mn.num_nodes, mn.t)
    rng = np.random.default_rng(mn.seed)
    files = rng.integers(0, 256, size=(mn.n_files, layout.n_packets, mn.packet_bytes), dtype=np.uint8)
    return Placement(mn, files)


def retrievable_packets(user: UserSpec, placement: Placement) -> set[PacketId]:
    ranks = np.nonzero(placement.retrievable_mask(user.access_mask))[0]
    subsets = placement.layout.packets.subsets
    return {PacketId(n, subsets[r]) for n in range(placement.config.n_files) for r in ranks}


@dataclass
class SignalBlock:
    """Delivery record for one subtype.

    ``payloads[s]`` is the signal for the s-th (t+1)-subset in colex order.
    ``kept[s, i]`` says whether the term for member ``i`` is present (all
    True for plain MN signals).  ``present`` marks which payloads a receiver
    actually holds.
    """

    subtype: UserClass | None
    layout: SignalLayout
    role_demands: np.ndarray
    payloads: np.ndarray
    kept: np.ndarray
    present: np.ndarray

    @property
    def n(self) -> int:
        return self.payloads.shape[0]

    def signal_id(self, s: int) -> SignalId:
        return SignalId(self.subtype, self.layout.signals.subsets[s])

    def items(self) -> list[tuple[SignalId, bytes]]:
        return [(self.signal_id(s), self.payloads[s].tobytes()) for s in range(self.n) if self.present[s]]

    def with_payloads(self, payloads: np.ndarray, present: np.ndarray) -> "SignalBlock":
        return SignalBlock(self.subtype, self.layout, self.role_demands, payloads, self.kept, present)

    def transcript(self, K2: int | None = None) -> list[dict]:
        rows = []
        for s in range(self.n):
            subset = self.layout.signals.subsets[s]
            if K2:
                subset = [[v // K2, v % K2] for v in subset]
            rows.append({
                "subtype": self.subtype.value if self.subtype else None,
                "subset": list(subset),
                "payload_hash": hashlib.sha256(self.payloads[s].tobytes()).hexdigest(),
            })
        return rows


def role_demand_array(subtype: UserClass | None, demands, placement: Placement) -> np.ndarray:
    """Demands of the K users of one subtype, indexed by MN role (flat anchor)."""
    K = placement.config.num_nodes
    if hasattr(demands, "for_subtype"):
        arr = demands.for_subtype(subtype, placement.config.grid)
    else:
        arr = np.asarray(list(demands), dtype=np.int64)
        if arr.shape != (K,):
            raise IncompleteDemand(f"expected {K} role demands, got {arr.shape[0] if arr.ndim else 0}")
    if arr.min(initial=0) < 0 or arr.max(initial=0) >= placement.config.n_files:
        raise InvalidParameter("demand refers to a file that does not exist")
    return arr


def _xor_terms(placement: Placement, layout: SignalLayout, role_demands: np.ndarray, kept: np.ndarray) -> np.ndarray:
    B = placement.config.packet_bytes
    n = layout.n_signals
    out = np.zeros((n, B), dtype=np.uint8)
    if n == 0:
        return out
    files = role_demands[layout.members]
    terms = placement.files[files, layout.sub_rank]
    terms[~kept] = 0
    np.bitwise_xor.reduce(terms, axis=1, out=out)
    return out


def mn_signal_block(subtype: UserClass | None, demands, placement: Placement) -> SignalBlock:
    layout = placement.layout
    role_demands = role_demand_array(subtype, demands, placement)
    kept = np.ones((layout.n_signals, layout.t + 1), dtype=bool)
    payloads = _xor_terms(placement, layout, role_demands, kept)
    return SignalBlock(subtype, layout, role_demands, payloads, kept, np.ones(layout.n_signals, dtype=bool))


def mn_signals(subtype: UserClass | None, demands, placement: Placement) -> list[tuple[SignalId, bytes]]:
    """X_S for every (t+1)-subset S, in colex order of S."""
    return mn_signal_block(subtype, demands, placement).items()


def decode_user(user: UserSpec, signals: SignalBlock, placement: Placement, demand: int | None = None,
                role: int | None = None) -> np.ndarray:
    """Recover the requested file as an ``(F, packet_bytes)`` array.

    Packets indexed by subsets meeting the access set come from the user's
    caches; every other packet ``W[d, T]`` is read off ``X_{T + role}`` after
    cancelling the remaining kept terms, all of which are cache-retrievable.
    """
    layout = signals.layout
    a = user.role if role is None else role
    d = int(signals.role_demands[a]) if demand is None else demand
    view = CacheView(placement, user.access_mask)
    F, B = layout.n_packets, placement.config.packet_bytes
    out = np.zeros((F, B), dtype=np.uint8)
    have = np.nonzero(view.retrievable)[0]
    out[have] = view.read(d, have)
    if len(have) == F:
        return out

    sig, pos = np.nonzero(layout.members == a)
    T = layout.sub_rank[sig, pos]
    need = ~view.retrievable[T]
    sig, pos, T = sig[need], pos[need], T[need]
    if len(T) != F - len(have):
        raise DecodeFailure("signal layout does not cover every missing packet")

    missing = ~signals.present[sig] | ~signals.kept[sig, pos]
    if missing.any():
        subsets = layout.packets.subsets
        raise DecodeFailure(
            f"user {user.key} lacks {int(missing.sum())} signals",
            [PacketId(d, subsets[int(r)]) for r in T[missing]],
        )

    others = signals.kept[sig].copy()
    others[np.arange(len(sig)), pos] = False
    files = signals.role_demands[layout.members[sig]]
    terms = np.zeros(others.shape + (B,), dtype=np.uint8)
    terms[others] = view.read(files[others], layout.sub_rank[sig][others])
    out[T] = signals.payloads[sig] ^ np.bitwise_xor.reduce(terms, axis=1)
    return out


def mn_load(K: int, t: int) -> Fraction:
    if not 0 <= t <= K:
        raise InvalidParameter(f"t={t} outside [0, {K}]")
    return Fraction(K - t, t + 1)


def signal_count(K: int, t: int) -> int:
    return binom(K, t + 1)
