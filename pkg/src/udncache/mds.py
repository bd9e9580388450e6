"""Cauchy-matrix MDS codes: encoding and side-information decoding.

The generator is ``G[i, j] = 1 / (x_i + y_j)`` with ``x_i = i`` for
``i < k`` and ``y_j = k + j`` for ``j < n``.  Every square submatrix of a
Cauchy matrix is itself Cauchy and hence invertible, so a receiver that
already knows all but ``u <= k`` of the n message symbols can use the
first u code symbols and invert the u x u Cauchy block in closed form.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from .errors import FieldExhausted, InsufficientSideInformation, InvalidParameter, MDSViolation
from .gf import Field, field_for, get_field


class CauchyCode:
    """Precomputed logarithm tables for one (n, k, field) Cauchy code."""

    def __init__(self, n: int, k: int, field: Field):
        if n < 1 or not 0 <= k <= n:
            raise InvalidParameter(f"need 0 <= k <= n, n >= 1 (got n={n}, k={k})")
        if n + k > field.order:
            raise FieldExhausted(f"GF(2^{field.m}) has too few elements for n={n}, k={k}")
        self.n, self.k, self.field = n, k, field
        Q = field.Q
        self.x = np.arange(k, dtype=np.int64)
        self.y = np.arange(k, k + n, dtype=np.int64)
        # log(x_i + y_j); the generator's logs are the negatives mod Q
        self.lxy = field.log[self.x[:, None] ^ self.y[None, :]]
        self.log_g = ((Q - self.lxy) % Q).astype(np.int32)
        self._extra = None

    @property
    def generator(self) -> np.ndarray:
        return self.field.exp[self.log_g]

    def _tables(self):
        if self._extra is None:
            log = self.field.log
            lxx = log[self.x[:, None] ^ self.x[None, :]]
            np.fill_diagonal(lxx, 0)
            lyy = log[self.y[:, None] ^ self.y[None, :]]
            np.fill_diagonal(lyy, 0)
            self._extra = (
                self.lxy.sum(axis=1, dtype=np.int64),
                np.cumsum(self.lxy, axis=0, dtype=np.int64),
                np.cumsum(lxx, axis=1, dtype=np.int64),
                lyy,
                lyy.sum(axis=1, dtype=np.int64),
            )
        return self._extra

    def inverse_rows(self, u: int, unknown: np.ndarray, known: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """Logs of selected rows of the inverse of ``G[:u, unknown]``.

        ``rows`` indexes into ``unknown``.  Uses the closed-form Cauchy
        inverse, so the cost is O(len(rows) * u) after O(u * len(known))
        bookkeeping.
        """
        Q = self.field.Q
        rowsum, colcum, cumxx, lyy, lyy_sum = self._tables()
        la = rowsum[:u] - self.lxy[:u][:, known].sum(axis=1, dtype=np.int64)
        lc = cumxx[:u, u - 1]
        cols = unknown[rows]
        lb = colcum[u - 1, cols]
        ld = lyy_sum[cols] - lyy[cols][:, known].sum(axis=1, dtype=np.int64)
        row_part = ((la - lc) % Q).astype(np.int32)
        col_part = ((lb - ld) % Q).astype(np.int32)
        # every term now lies in [0, Q), so one final reduction suffices
        logs = row_part[None, :] + col_part[:, None] + (Q - self.lxy[:u, cols].T)
        return logs % Q


@lru_cache(maxsize=8)
def cauchy_code(n: int, k: int, m: int) -> CauchyCode:
    return CauchyCode(n, k, get_field(m))


def cauchy_generator(n: int, k: int, field: Field | None = None) -> np.ndarray:
    """k x n Cauchy generator matrix over ``field`` (chosen from n if omitted)."""
    field = field or field_for(n)
    return cauchy_code(n, k, field.m).generator


@dataclass
class MdsBlock:
    subtype: object
    n: int
    k: int
    field_degree: int
    symbols: np.ndarray  # (k, L) field elements
    payload_bytes: int

    @property
    def field(self) -> Field:
        return get_field(self.field_degree)

    @property
    def code(self) -> CauchyCode:
        return cauchy_code(self.n, self.k, self.field_degree)

    @property
    def generator(self) -> np.ndarray:
        return self.code.generator

    def to_json(self) -> dict:
        code = self.code
        payloads = self.field.from_symbols(self.symbols)
        return {
            "subtype": getattr(self.subtype, "value", self.subtype),
            "n": self.n,
            "k": self.k,
            "field_degree": self.field_degree,
            "cauchy_x": code.x.tolist(),
            "cauchy_y": code.y.tolist(),
            "symbol_hashes": [hashlib.sha256(p.tobytes()).hexdigest() for p in payloads],
        }


def mds_encode(signals: np.ndarray, h: int, field: Field | None = None, subtype=None) -> MdsBlock:
    """Compress n equal-length payloads into n - h Cauchy-coded symbols."""
    signals = np.asarray(signals, dtype=np.uint8)
    n = signals.shape[0]
    if n < 1:
        raise InvalidParameter("nothing to encode")
    if not 0 <= h <= n:
        raise InvalidParameter(f"redundancy h={h} outside [0, n={n}]")
    field = field or field_for(n)
    k = n - h
    X = field.to_symbols(signals)
    if k == 0:
        symbols = np.zeros((0, X.shape[1]), dtype=field.dtype)
    else:
        symbols = field.combine(cauchy_code(n, k, field.m).log_g, X)
    return MdsBlock(subtype, n, k, field.m, symbols, signals.shape[1])


def decode_positions(block: MdsBlock, known_idx: np.ndarray, known_payloads: np.ndarray,
                     wanted: np.ndarray | None = None) -> np.ndarray:
    """Recover payloads at ``wanted`` positions (all n when None).

    ``known_idx`` lists the positions whose payloads the receiver already
    holds, in the row order of ``known_payloads``.
    """
    field = block.field
    n, k = block.n, block.k
    known_idx = np.asarray(known_idx, dtype=np.int64)
    if len(np.unique(known_idx)) != len(known_idx) or (len(known_idx) and (known_idx.min() < 0 or known_idx.max() >= n)):
        raise InvalidParameter("known positions must be distinct and inside the block")
    h = n - k
    if len(known_idx) < h:
        raise InsufficientSideInformation(f"{len(known_idx)} known signals, at least {h} needed")
    wanted = np.arange(n) if wanted is None else np.asarray(wanted, dtype=np.int64)

    B = block.payload_bytes
    Xk = field.to_symbols(np.asarray(known_payloads, dtype=np.uint8).reshape(len(known_idx), B))
    slot = np.full(n, -1, dtype=np.int64)
    slot[known_idx] = np.arange(len(known_idx))
    out = np.zeros((len(wanted), Xk.shape[1]), dtype=field.dtype)
    have = slot[wanted] >= 0
    out[have] = Xk[slot[wanted[have]]]
    if have.all():
        return field.from_symbols(out)

    is_known = np.zeros(n, dtype=bool)
    is_known[known_idx] = True
    order = np.argsort(known_idx)
    known_sorted, Xk_sorted = known_idx[order], Xk[order]
    unknown = np.nonzero(~is_known)[0]
    u = len(unknown)
    code = block.code
    y_adj = block.symbols[:u] ^ field.combine(code.log_g[:u][:, known_sorted], Xk_sorted)
    pos_in_unknown = np.searchsorted(unknown, wanted[~have])
    logs = code.inverse_rows(u, unknown, known_sorted, pos_in_unknown)
    out[~have] = field.combine(logs, y_adj)
    return field.from_symbols(out)


def mds_decode_user(known: Mapping[int, bytes | np.ndarray], block: MdsBlock,
                    wanted=None) -> np.ndarray:
    """All n payloads (or just ``wanted``) from side information plus the block's symbols."""
    idx = np.fromiter(known.keys(), dtype=np.int64, count=len(known))
    if len(known):
        payloads = np.stack([np.frombuffer(bytes(v), dtype=np.uint8) if not isinstance(v, np.ndarray) else v
                             for v in known.values()])
    else:
        payloads = np.zeros((0, block.payload_bytes), dtype=np.uint8)
    return decode_positions(block, idx, payloads, wanted)


def check_solution(block: MdsBlock, payloads: np.ndarray) -> None:
    """Re-encode recovered payloads and compare with the block's symbols."""
    field = block.field
    again = field.combine(block.code.log_g, field.to_symbols(payloads))
    if not np.array_equal(again, block.symbols):
        raise MDSViolation("recovered payloads do not re-encode to the transmitted symbols")
