"""Table-driven arithmetic in GF(2^8) and GF(2^16).

Elements are plain integers.  Logarithms of zero map to a sentinel
``2 * Q`` (Q = 2^m - 1) and the exponent table is padded with zeros past
``2 * Q``, so ``exp[log[a] + log[b]]`` is a branch-free product even when
an operand is zero.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DivisionByZero, FieldExhausted, InvalidParameter, SingularSystem

POLYNOMIALS = {8: 0x11B, 16: 0x1100B}
GENERATORS = {8: 3, 16: 2}


def _clmul_mod(a: int, b: int, poly: int, m: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return r


class Field:
    def __init__(self, m: int):
        if m not in POLYNOMIALS:
            raise InvalidParameter(f"unsupported extension degree {m}")
        self.m = m
        self.poly = POLYNOMIALS[m]
        self.generator = GENERATORS[m]
        self.order = 1 << m
        Q = self.Q = self.order - 1
        self.dtype = np.uint8 if m == 8 else np.uint16
        self.zero_log = 2 * Q

        exp = np.zeros(4 * Q + 2, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(Q):
            exp[i] = x
            log[x] = i
            x = _clmul_mod(x, self.generator, self.poly, m)
            if x == 1 and i < Q - 1:
                raise InvalidParameter(f"element {self.generator} is not primitive in GF(2^{m})")
        exp[Q:2 * Q] = exp[:Q]
        log[0] = self.zero_log
        self.exp = exp.astype(self.dtype)
        self.log = log.astype(np.int32)

    def __repr__(self) -> str:
        return f"Field(2^{self.m}, poly={self.poly:#x})"

    def mul(self, a, b):
        return self.exp[self.log[np.asarray(a)] + self.log[np.asarray(b)]]

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        return self.exp[(self.Q - self.log[a]) % self.Q]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def combine(self, log_coeffs: np.ndarray, symbols: np.ndarray) -> np.ndarray:
        """Matrix product ``C @ X`` with C given by its (finite) logarithms.

        ``log_coeffs`` is (r, c); ``symbols`` is (c, L).  Returns (r, L).
        """
        r, c = log_coeffs.shape
        L = symbols.shape[1]
        out = np.zeros((r, L), dtype=self.dtype)
        if r == 0 or c == 0:
            return out
        logx = self.log[symbols]
        # keep each temporary around 4M entries
        step = max(1, (1 << 22) // max(1, c))
        for lo in range(0, r, step):
            block = log_coeffs[lo:lo + step]
            for col in range(L):
                np.bitwise_xor.reduce(self.exp[block + logx[:, col]], axis=1, out=out[lo:lo + step, col])
        return out

    def to_symbols(self, payloads: np.ndarray) -> np.ndarray:
        payloads = np.ascontiguousarray(payloads, dtype=np.uint8)
        if self.m == 8:
            return payloads
        if payloads.shape[-1] % 2:
            raise InvalidParameter("GF(2^16) symbols need an even payload length")
        return payloads.view("<u2")

    def from_symbols(self, symbols: np.ndarray) -> np.ndarray:
        symbols = np.ascontiguousarray(symbols, dtype=self.dtype)
        if self.m == 8:
            return symbols
        return symbols.astype("<u2").view(np.uint8)

    def solve(self, A: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Gauss-Jordan elimination; ``b`` may be a vector or an (n, L) matrix."""
        A = np.array(A, dtype=np.int64)
        n = A.shape[0]
        if A.shape != (n, n):
            raise InvalidParameter("mat_solve needs a square matrix")
        vec = np.ndim(b) == 1
        B = np.array(b, dtype=np.int64).reshape(n, -1)
        for col in range(n):
            nz = np.nonzero(A[col:, col])[0]
            if len(nz) == 0:
                raise SingularSystem(f"no pivot in column {col}")
            p = col + nz[0]
            if p != col:
                A[[col, p]] = A[[p, col]]
                B[[col, p]] = B[[p, col]]
            scale = self.inv(A[col, col])
            A[col] = self.mul(A[col], scale)
            B[col] = self.mul(B[col], scale)
            f = A[:, col].copy()
            f[col] = 0
            rows = np.nonzero(f)[0]
            if len(rows):
                A[rows] ^= self.mul(f[rows, None], A[col][None, :])
                B[rows] ^= self.mul(f[rows, None], B[col][None, :])
        return B[:, 0] if vec else B

    def rank(self, A: np.ndarray) -> int:
        A = np.array(A, dtype=np.int64)
        rows, cols = A.shape
        r = 0
        for col in range(cols):
            if r == rows:
                break
            nz = np.nonzero(A[r:, col])[0]
            if len(nz) == 0:
                continue
            p = r + nz[0]
            A[[r, p]] = A[[p, r]]
            A[r] = self.mul(A[r], self.inv(A[r, col]))
            f = A[:, col].copy()
            f[r] = 0
            idx = np.nonzero(f)[0]
            if len(idx):
                A[idx] ^= self.mul(f[idx, None], A[r][None, :])
            r += 1
        return r


@lru_cache(maxsize=None)
def get_field(m: int) -> Field:
    return Field(m)


def field_for(n: int) -> Field:
    """Smallest supported field with at least 2n elements."""
    for m in (8, 16):
        if 2 * n <= 1 << m:
            return get_field(m)
    raise FieldExhausted(f"no supported field has {2 * n} elements")


def gf_mul(field: Field, a, b):
    return field.mul(a, b)


def gf_inv(field: Field, a):
    return field.inv(a)


def mat_solve(field: Field, A, b):
    return field.solve(A, b)
