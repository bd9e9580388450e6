"""Demand maps: which file each enumerated user requests."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import IncompleteDemand, InvalidParameter
from .geometry import GridConfig, NodeId, UserClass, UserSpec, enumerate_users


class DemandMap:
    """Requested file per user, keyed by (class, anchor)."""

    def __init__(self, demands: dict[tuple[UserClass, NodeId], int], n_files: int | None = None):
        self._d = {(UserClass.parse(c), NodeId(*a)): int(f) for (c, a), f in demands.items()}
        if n_files is not None:
            for key, f in self._d.items():
                if not 0 <= f < n_files:
                    raise InvalidParameter(f"demand {f} of user {key[0].value}{tuple(key[1])} outside [0, {n_files})")

    def __getitem__(self, user: UserSpec) -> int:
        try:
            return self._d[(user.cls, user.anchor)]
        except KeyError:
            raise IncompleteDemand(f"no demand for user {user.cls.value} at {tuple(user.anchor)}") from None

    def __len__(self) -> int:
        return len(self._d)

    def for_subtype(self, subtype: UserClass, grid: tuple[int, int]) -> np.ndarray:
        K1, K2 = grid
        out = np.empty(K1 * K2, dtype=np.int64)
        for k1 in range(K1):
            for k2 in range(K2):
                try:
                    out[k1 * K2 + k2] = self._d[(subtype, NodeId(k1, k2))]
                except KeyError:
                    raise IncompleteDemand(f"no demand for subtype {subtype.value} anchor ({k1},{k2})") from None
        return out

    def to_json(self) -> list[dict]:
        return [
            {"class": c.value, "anchor": [a.k1, a.k2], "file": f}
            for (c, a), f in self._d.items()
        ]

    @classmethod
    def from_json(cls, records: list[dict], n_files: int | None = None) -> "DemandMap":
        try:
            d = {(UserClass.parse(r["class"]), NodeId(*r["anchor"])): int(r["file"]) for r in records}
        except (KeyError, TypeError) as exc:
            raise InvalidParameter(f"malformed demand record: {exc}") from None
        return cls(d, n_files)

    @classmethod
    def load(cls, path: str | Path, n_files: int | None = None) -> "DemandMap":
        return cls.from_json(json.loads(Path(path).read_text()), n_files)


def worst_case_demands(config: GridConfig) -> DemandMap:
    """All-distinct demands in enumeration order; needs N >= number of users."""
    users = enumerate_users(config)
    if config.n_files < len(users):
        raise InvalidParameter(
            f"worst-case distinct demands need N >= U = {len(users)} (got N = {config.n_files})"
        )
    return DemandMap({(u.cls, u.anchor): i for i, u in enumerate(users)}, config.n_files)


def random_demands(config: GridConfig, seed: int) -> DemandMap:
    users = enumerate_users(config)
    rng = np.random.default_rng(seed)
    files = rng.integers(0, config.n_files, size=len(users))
    return DemandMap({(u.cls, u.anchor): int(f) for u, f in zip(users, files)}, config.n_files)
