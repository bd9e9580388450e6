"""Cyclic node grid, modular distance and user families."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameter

SQRT2_2 = math.sqrt(2.0) / 2.0


class NodeId(NamedTuple):
    k1: int
    k2: int

    def flat(self, K2: int) -> int:
        return self.k1 * K2 + self.k2


class Regime(enum.Enum):
    MIN = "min"
    MID = "mid"
    MAX = "max"

    @classmethod
    def parse(cls, value: "Regime | str") -> "Regime":
        if isinstance(value, Regime):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParameter(f"unknown regime {value!r}; expected min, mid or max") from None

    def contains(self, r: float) -> bool:
        if self is Regime.MIN:
            return math.isclose(r, SQRT2_2)
        if self is Regime.MAX:
            return math.isclose(r, 1.0)
        return SQRT2_2 < r < 1.0


class UserClass(enum.Enum):
    """The eight access-set families.  Offsets are (row, column) steps."""

    I = "I"
    II_1 = "II-1"
    II_2 = "II-2"
    III_1 = "III-1"
    III_2 = "III-2"
    III_3 = "III-3"
    III_4 = "III-4"
    IV = "IV"

    @property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        return _OFFSETS[self]

    @property
    def size(self) -> int:
        return len(_OFFSETS[self])

    @property
    def family(self) -> str:
        return self.value.split("-")[0]

    @classmethod
    def parse(cls, value: "UserClass | str") -> "UserClass":
        if isinstance(value, UserClass):
            return value
        for c in cls:
            if c.value == value or c.name == value:
                return c
        raise InvalidParameter(f"unknown user class {value!r}")


# Chain order matters for the redundancy counting: anchor first.
_OFFSETS = {
    UserClass.I: ((0, 0),),
    UserClass.II_1: ((0, 0), (0, 1)),
    UserClass.II_2: ((0, 0), (1, 0)),
    UserClass.III_1: ((0, 0), (0, 1), (1, 0)),
    UserClass.III_2: ((0, 0), (1, 0), (1, 1)),
    UserClass.III_3: ((0, 0), (0, 1), (1, 1)),
    UserClass.III_4: ((0, 0), (0, -1), (-1, 0)),
    UserClass.IV: ((0, 0), (1, 0), (0, 1), (1, 1)),
}

REGIME_CLASSES: dict[Regime, tuple[UserClass, ...]] = {
    Regime.MIN: (UserClass.I, UserClass.II_1, UserClass.II_2),
    Regime.MID: tuple(UserClass),
    Regime.MAX: tuple(c for c in UserClass if c is not UserClass.I),
}


def regime_classes(regime: Regime | str) -> tuple[UserClass, ...]:
    return REGIME_CLASSES[Regime.parse(regime)]


@dataclass(frozen=True)
class UserSpec:
    cls: UserClass
    anchor: NodeId
    access: tuple[NodeId, ...]
    grid: tuple[int, int]

    @property
    def role(self) -> int:
        """Flat index of the anchor; the MN user index this user plays."""
        return self.anchor.flat(self.grid[1])

    @property
    def access_flat(self) -> tuple[int, ...]:
        return tuple(n.flat(self.grid[1]) for n in self.access)

    @property
    def access_mask(self) -> int:
        m = 0
        for f in self.access_flat:
            m |= 1 << f
        return m

    @property
    def chain(self) -> tuple[NodeId, ...]:
        """Access nodes in family order (anchor first)."""
        K1, K2 = self.grid
        a = self.anchor
        return tuple(NodeId((a.k1 + d1) % K1, (a.k2 + d2) % K2) for d1, d2 in self.cls.offsets)

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.cls.value, self.anchor.k1, self.anchor.k2)


def make_user(cls: UserClass, anchor: NodeId, K1: int, K2: int) -> UserSpec:
    nodes = {NodeId((anchor.k1 + d1) % K1, (anchor.k2 + d2) % K2) for d1, d2 in cls.offsets}
    return UserSpec(cls, NodeId(*anchor), tuple(sorted(nodes)), (K1, K2))


@dataclass(frozen=True)
class GridConfig:
    K1: int
    K2: int
    regime: Regime = Regime.MID
    t: int = 1
    n_files: int | None = None
    packet_bytes: int = 64
    seed: int = 0
    r: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "regime", Regime.parse(self.regime))
        if self.K1 < 3 or self.K2 < 3:
            raise InvalidParameter(f"K1 and K2 must be at least 3 (got {self.K1}x{self.K2})")
        if not 0 <= self.t <= self.K1 * self.K2:
            raise InvalidParameter(f"t must lie in [0, K1*K2] = [0, {self.K1 * self.K2}] (got {self.t})")
        if self.packet_bytes < 1:
            raise InvalidParameter("packet_bytes must be positive")
        if self.n_files is None:
            object.__setattr__(self, "n_files", self.n_users)
        if self.n_files < 1:
            raise InvalidParameter("number of files must be positive")
        if self.r is not None and not self.regime.contains(self.r):
            raise InvalidParameter(f"r={self.r} is outside the {self.regime.value} regime")

    @property
    def K(self) -> int:
        return self.K1 * self.K2

    @property
    def n_users(self) -> int:
        return user_count(self.regime, self.K1, self.K2)

    @property
    def memory(self):
        """M as an exact rational (M = t N / K)."""
        from fractions import Fraction

        return Fraction(self.t * self.n_files, self.K)

    @classmethod
    def from_memory(cls, K1: int, K2: int, M, N: int, **kw) -> "GridConfig":
        from fractions import Fraction

        from .errors import UnsupportedMemoryPoint

        t = Fraction(K1 * K2) * Fraction(M) / N
        if t.denominator != 1:
            raise UnsupportedMemoryPoint(f"K1*K2*M/N = {t} is not an integer")
        return cls(K1, K2, t=int(t), n_files=N, **kw)


def mod_dist_1d(k: float, k2: float, K: int) -> float:
    if K < 1:
        raise InvalidParameter(f"modulus must be positive (got {K})")
    d = abs(k - k2) % K
    return min(d, K - d)


def mod_dist_2d(p: tuple[float, float], q: NodeId | tuple[int, int], K1: int, K2: int) -> float:
    """Cyclic Euclidean distance between a real point and a node."""
    d1 = mod_dist_1d(p[0], q[0], K1)
    d2 = mod_dist_1d(p[1], q[1], K2)
    return math.hypot(d1, d2)


def _neighbours(anchor: NodeId, K1: int, K2: int) -> list[NodeId]:
    return [
        NodeId((anchor.k1 + d1) % K1, (anchor.k2 + d2) % K2)
        for d1 in (-1, 0, 1)
        for d2 in (-1, 0, 1)
    ]


def classify_point(anchor: NodeId, x: float, y: float, r: float, K1: int, K2: int) -> tuple[NodeId, ...]:
    """Nodes within distance ``r`` (closed disk) of the point ``anchor + (x, y)``.

    Only the 3x3 neighbourhood can qualify since ``|x|, |y| < 1`` and ``r <= 1``.
    """
    if not SQRT2_2 - 1e-12 <= r <= 1.0 + 1e-12:
        raise InvalidParameter(f"radius {r} outside [sqrt(2)/2, 1]")
    anchor = NodeId(*anchor)
    p = (anchor.k1 + x, anchor.k2 + y)
    found = {q for q in _neighbours(anchor, K1, K2) if mod_dist_2d(p, q, K1, K2) <= r}
    return tuple(sorted(found))


def enumerate_users(config: GridConfig) -> list[UserSpec]:
    users = []
    for cls in regime_classes(config.regime):
        for k1 in range(config.K1):
            for k2 in range(config.K2):
                users.append(make_user(cls, NodeId(k1, k2), config.K1, config.K2))
    return users


_PER_NODE = {Regime.MIN: 3, Regime.MID: 8, Regime.MAX: 7}


def user_count(regime: Regime | str, K1: int, K2: int) -> int:
    return _PER_NODE[Regime.parse(regime)] * K1 * K2


def witness_point(cls: UserClass, r: float) -> tuple[float, float]:
    """An interior point (x, y) around anchor (0, 0) whose access set has shape ``cls``."""
    s = math.sqrt(max(r * r - 0.25, 0.0))
    return {
        UserClass.I: ((1 - r) / 2, (1 - r) / 2),
        UserClass.II_1: (0.0, 0.5),
        UserClass.II_2: (0.5, 0.0),
        UserClass.III_1: (1 - s, 1 - s),
        UserClass.III_2: (s, 1 - s),
        UserClass.III_3: (1 - s, s),
        UserClass.III_4: (-1 + s, -1 + s),
        UserClass.IV: (0.5, 0.5),
    }[cls]


def shape_of(offsets) -> UserClass | None:
    """Identify a set of (d1, d2) offsets as a translated family shape."""
    target = set(offsets)
    for cls in UserClass:
        base = cls.offsets
        for o1, o2 in target:
            # try aligning every member with the family's anchor
            shifted = {(b1 + o1, b2 + o2) for b1, b2 in base}
            if shifted == target:
                return cls
    return None


_NEIGHBOUR_OFFSETS = np.array([(d1, d2) for d1 in (-1, 0, 1) for d2 in (-1, 0, 1)], dtype=float)


def region_census(r: float, samples_per_cell: int, seed: int = 0) -> dict[str, dict]:
    """Monte Carlo partition of the square cell around one node by access shape.

    Points are drawn uniformly from ``[-1/2, 1/2)^2`` around node (0, 0) and
    classified with strict comparisons (distance < r).  Returns, per family
    shape, the offsets of one representative set, the sample count and the
    estimated area fraction of the cell.
    """
    if samples_per_cell < 1:
        raise InvalidParameter("samples_per_cell must be at least 1")
    rng = np.random.default_rng(seed)
    pts = rng.random((samples_per_cell, 2)) - 0.5
    diff = pts[:, None, :] - _NEIGHBOUR_OFFSETS[None, :, :]
    inside = (diff ** 2).sum(axis=2) < r * r
    codes = inside @ (1 << np.arange(9))
    census: dict[str, dict] = {}
    for code, count in zip(*np.unique(codes, return_counts=True)):
        offs = [tuple(int(v) for v in _NEIGHBOUR_OFFSETS[i]) for i in range(9) if code >> i & 1]
        cls = shape_of(offs)
        name = cls.value if cls is not None else "other:" + ";".join(f"{a},{b}" for a, b in offs)
        entry = census.setdefault(name, {"shape": offs, "count": 0, "area_fraction": 0.0})
        entry["count"] += int(count)
    for entry in census.values():
        entry["area_fraction"] = entry["count"] / samples_per_cell
    return dict(sorted(census.items()))
