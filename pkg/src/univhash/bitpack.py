"""Packed GF(2) kernels for the Monte Carlo hot loops.

A binary sequence of length ``n <= 63`` is stored in one ``uint64`` with the
first symbol in the most significant used bit, so integer order equals
lexicographic order.  Results must agree exactly with the generic decoders in
:mod:`univhash.coders`; the test suite checks this.
"""
from __future__ import annotations

import math

import numpy as np

from .coders import TIE_TOL
from .gfq import coefficient_grid

MAX_N = 63
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


def supported(q: int, n: int) -> bool:
    return q == 2 and n <= MAX_N


def pack(X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.uint64))
    n = X.shape[1]
    weights = np.left_shift(np.uint64(1), np.arange(n - 1, -1, -1, dtype=np.uint64))
    return (X * weights).sum(axis=1, dtype=np.uint64)


def unpack(v, n: int) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=np.uint64))
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    return ((v[:, None] >> shifts) & np.uint64(1)).astype(np.int64)


def span(basis: np.ndarray) -> np.ndarray:
    """All ``2**k`` combinations of the basis rows, packed."""
    k = basis.shape[0]
    if k == 0:
        return np.zeros(1, dtype=np.uint64)
    rows = pack(basis)
    out = np.zeros(1, dtype=np.uint64)
    for r in rows:
        out = np.concatenate([out, out ^ r])
    return out


def parity_product(rows: np.ndarray, v) -> np.ndarray:
    """``M v`` over GF(2) with ``M`` given by packed rows; one output column per row."""
    v = np.atleast_1d(np.asarray(v, dtype=np.uint64))
    return (np.bitwise_count(v[:, None] & rows[None, :]) & 1).astype(np.int64)


def _xlogx(n: int) -> np.ndarray:
    c = np.arange(n + 1, dtype=float)
    out = np.zeros(n + 1)
    out[1:] = c[1:] * np.log2(c[1:])
    return out


def entropy_table(n: int) -> np.ndarray:
    """Empirical entropy of a binary sequence indexed by its weight."""
    t = _xlogx(n)
    w = np.arange(n + 1)
    return np.maximum(math.log2(n) - (t[w] + t[n - w]) / n, 0.0)


def _pick(cands: np.ndarray, scores: np.ndarray) -> np.ndarray:
    lo = scores.min(axis=1, keepdims=True)
    return np.where(scores <= lo + TIE_TOL, cands, _ALL).min(axis=1)


def source_decode_many(x_packed: np.ndarray, null_span: np.ndarray, n: int,
                       chunk_cells: int = 1 << 22) -> np.ndarray:
    """Decode the syndrome of each ``x``; its coset is ``x + ker A``."""
    h = entropy_table(n)
    out = np.empty_like(x_packed)
    step = max(1, chunk_cells // null_span.size)
    for s in range(0, x_packed.size, step):
        C = x_packed[s:s + step, None] ^ null_span[None, :]
        out[s:s + step] = _pick(C, h[np.bitwise_count(C)])
    return out


class ConditionalDecoder:
    """Minimum ``H(x|y)`` over a fixed packed coset."""

    def __init__(self, members: np.ndarray, n: int):
        self.members = np.sort(members)
        self.n = n
        self.full = np.uint64((1 << n) - 1)
        self.t = _xlogx(n)

    def __call__(self, y_packed) -> int:
        y = np.uint64(y_packed)
        M = self.members
        t = self.t
        n1 = int(np.bitwise_count(y))
        n0 = self.n - n1
        w1 = np.bitwise_count(M & y)
        w0 = np.bitwise_count(M & (~y & self.full))
        s = (t[n0] - t[w0] - t[n0 - w0] + t[n1] - t[w1] - t[n1 - w1]) / self.n
        # members are sorted, so the first tied index is the lexicographic minimum
        return int(M[np.flatnonzero(s <= s.min() + TIE_TOL)[0]])
