"""Minimum-entropy decoders and the minimum-divergence encoder.

Every argmin here breaks ties by the lexicographically smallest sequence;
two scores are tied when they differ by at most :data:`TIE_TOL` (distinct
empirical entropies at tractable lengths are far further apart).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import types as ty
from .gfq import (Coset, DimensionError, FieldMatrix, MAX_FREE_DIMS,
                  ResourceGuardError, _row_reduce, as_vector, image_size,
                  mat_vec_mul, nullspace, solve_affine, stack)

TIE_TOL = 1e-9


class DecodingFailure(ValueError):
    """The syndrome has an empty coset."""


class EncodingFailure(ValueError):
    """No sequence satisfies both linear constraints."""


def rows_for_rate(n: int, rate: float, q: int) -> int:
    """``ceil(n R / log2 q)`` with a small guard against float round-up."""
    return max(0, math.ceil(n * rate / math.log2(q) - 1e-9))


@dataclass(frozen=True, eq=False)
class SourceCode:
    A: FieldMatrix

    def __post_init__(self):
        if self.A.rows < 1:
            raise ValueError("a source code needs at least one row")
        if self.A.rows > self.A.cols:
            raise ValueError("rate above log2 q: more rows than columns")

    @property
    def q(self) -> int:
        return self.A.q

    @property
    def n(self) -> int:
        return self.A.cols

    @property
    def rate(self) -> float:
        """Realized rate ``l_A log2 q / n`` in bits per symbol."""
        return self.A.rows * math.log2(self.q) / self.n


@dataclass(frozen=True, eq=False)
class ChannelCode:
    A: FieldMatrix
    B: FieldMatrix
    c: np.ndarray
    mu_x: ty.Distribution
    y_size: Optional[int] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.A.q != self.B.q or self.A.cols != self.B.cols:
            raise DimensionError("A and B must share modulus and column count")
        if self.mu_x.size != self.A.q:
            raise DimensionError("input distribution must cover GF(q)")
        c = as_vector(self.c, self.A.q)
        if c.shape != (self.A.rows,):
            raise DimensionError(f"c must have length {self.A.rows}")
        if solve_affine(self.A, c) is None:
            raise ValueError("c is not in the image of A")
        object.__setattr__(self, "c", c)
        if self.y_size is None:
            object.__setattr__(self, "y_size", self.A.q)

    @property
    def q(self) -> int:
        return self.A.q

    @property
    def n(self) -> int:
        return self.A.cols

    @property
    def rate_a(self) -> float:
        return math.log2(image_size(self.A)) / self.n if self.A.rows else 0.0

    @property
    def rate_b(self) -> float:
        return math.log2(image_size(self.B)) / self.n if self.B.rows else 0.0

    def decoding_coset(self) -> Coset:
        if "coset" not in self._cache:
            self._cache["coset"] = solve_affine(self.A, self.c)
        return self._cache["coset"]

    def stacked(self) -> FieldMatrix:
        if "AB" not in self._cache:
            self._cache["AB"] = stack(self.A, self.B)
        return self._cache["AB"]

    def messages(self) -> np.ndarray:
        """All of ``Im B`` in lexicographic order."""
        if "messages" not in self._cache:
            # Im B is the column space of B
            span = Coset(np.zeros(self.B.rows, dtype=np.int64),
                         _row_basis(self.B.data.T, self.q), self.q)
            self._cache["messages"] = _lex_sorted(span.members())
        return self._cache["messages"]


def _row_basis(M: np.ndarray, q: int) -> np.ndarray:
    if M.shape[0] == 0:
        return np.zeros((0, M.shape[1]), dtype=np.int64)
    R, piv = _row_reduce(M, q)
    return R[: len(piv)]


def _lex_sorted(X: np.ndarray) -> np.ndarray:
    if X.shape[1] == 0:
        return X
    return X[np.lexsort(X.T[::-1])]


@dataclass(frozen=True, eq=False)
class DecodeOutcome:
    value: np.ndarray
    tie_count: int = 1

    def __iter__(self):
        yield self.value
        yield self.tie_count


def lex_argmin(X: np.ndarray, scores: np.ndarray, tol: float = TIE_TOL):
    """Index of the lexicographically smallest row among the minimal scores."""
    best = scores.min()
    tied = np.flatnonzero(scores <= best + tol)
    if tied.size == 1:
        return int(tied[0]), 1
    sub = X[tied]
    order = np.lexsort(sub.T[::-1])
    return int(tied[order[0]]), int(tied.size)


# -- source coding -----------------------------------------------------------

def source_encode(code: SourceCode, x) -> np.ndarray:
    x = as_vector(x, code.q)
    if x.shape[-1] != code.n:
        raise DimensionError(f"expected length {code.n}, got {x.shape[-1]}")
    return mat_vec_mul(code.A, x)


def source_decode(code: SourceCode, c, search: str = "coset",
                  max_free: int = MAX_FREE_DIMS) -> DecodeOutcome:
    """Minimum empirical entropy member of ``{x : A x = c}``.

    ``search="types"`` walks type classes in order of increasing entropy and
    stops at the first class level that meets the coset; it returns the same
    answer as exhaustive coset search.
    """
    coset = solve_affine(code.A, c)
    if coset is None:
        raise DecodingFailure("syndrome is not in the image of A")
    if search == "types":
        return _decode_by_types(code, coset)
    if search != "coset":
        raise ValueError(f"unknown search {search!r}")
    X = coset.members(max_free)
    idx, ties = lex_argmin(X, ty.batch_entropy(X, code.q))
    return DecodeOutcome(X[idx], ties)


def type_class_members(T: ty.TypeHistogram) -> np.ndarray:
    """All sequences with histogram ``T``, in lexicographic order."""
    n, k = T.n, T.alphabet_size
    out = []

    def rec(prefix, left):
        if len(prefix) == n:
            out.append(prefix)
            return
        for a in range(k):
            if left[a]:
                left[a] -= 1
                rec(prefix + [a], left)
                left[a] += 1

    rec([], list(T.counts))
    return np.array(out, dtype=np.int64).reshape(-1, n)


def _decode_by_types(code: SourceCode, coset: Coset,
                     budget: int = 1 << MAX_FREE_DIMS) -> DecodeOutcome:
    types = ty.enumerate_types(code.n, code.q)
    hs = np.array([ty.entropy(T) for T in types])
    order = np.argsort(hs, kind="stable")
    seen = 0
    i = 0
    while i < len(order):
        # gather one entropy level (ties within TIE_TOL)
        level = [order[i]]
        j = i + 1
        while j < len(order) and hs[order[j]] <= hs[order[i]] + TIE_TOL:
            level.append(order[j])
            j += 1
        hits = []
        for t in level:
            seen += ty.type_class_size(types[t])
            if seen > budget:
                raise ResourceGuardError("type-pruned search exceeded its budget")
            members = type_class_members(types[t])
            ok = ~((mat_vec_mul(code.A, members) - coset_rhs(code.A, coset)) % code.q).any(axis=1)
            hits.extend(members[ok])
        if hits:
            H = np.array(hits)
            first = np.lexsort(H.T[::-1])[0]
            return DecodeOutcome(H[first], len(hits))
        i = j
    raise DecodingFailure("coset is empty")  # unreachable for a consistent coset


def coset_rhs(A: FieldMatrix, coset: Coset) -> np.ndarray:
    return mat_vec_mul(A, coset.particular)


# -- channel coding ----------------------------------------------------------

def channel_encode(code: ChannelCode, m, max_free: int = MAX_FREE_DIMS) -> DecodeOutcome:
    """Minimum ``D(nu_x || mu_X)`` member of ``{x : A x = c, B x = m}``."""
    m = as_vector(m, code.q)
    if m.shape != (code.B.rows,):
        raise DimensionError(f"message must have length {code.B.rows}")
    coset = solve_affine(code.stacked(), np.concatenate([code.c, m]))
    if coset is None:
        if solve_affine(code.B, m) is None:
            raise ValueError("message is not in the image of B")
        raise EncodingFailure("no input satisfies both A x = c and B x = m")
    X = coset.members(max_free)
    idx, ties = lex_argmin(X, ty.batch_divergence(X, code.mu_x))
    return DecodeOutcome(X[idx], ties)


def channel_decode_sequence(code: ChannelCode, y, max_free: int = MAX_FREE_DIMS) -> DecodeOutcome:
    """Minimum ``H(x|y)`` member of ``{x : A x = c}``."""
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (code.n,):
        raise DimensionError(f"channel output must have length {code.n}")
    if y.min() < 0 or y.max() >= code.y_size:
        raise ValueError("output symbol outside the channel alphabet")
    coset = code.decoding_coset()
    X = coset.members(max_free)
    idx, ties = lex_argmin(X, ty.batch_conditional_entropy(X, y, code.q, code.y_size))
    return DecodeOutcome(X[idx], ties)


def channel_decode(code: ChannelCode, y, max_free: int = MAX_FREE_DIMS) -> np.ndarray:
    """Message estimate ``B x_hat``."""
    return mat_vec_mul(code.B, channel_decode_sequence(code, y, max_free).value)


# -- additive-noise (syndrome) channel coding --------------------------------

def syndrome_channel_encode(A: FieldMatrix, rng=None, max_free: int = MAX_FREE_DIMS) -> np.ndarray:
    """Uniform codeword of ``{x : A x = 0}``."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    N = nullspace(A)
    if N.shape[0] > max_free:
        raise ResourceGuardError(f"code dimension {N.shape[0]} exceeds guard {max_free}")
    coeffs = rng.integers(0, A.q, size=N.shape[0])
    return (coeffs @ N) % A.q


def syndrome_channel_decode(A: FieldMatrix, y, max_free: int = MAX_FREE_DIMS):
    """Return ``(z_hat, x_hat)`` by source-decoding the noise from ``A y``."""
    y = as_vector(y, A.q)
    z_hat = source_decode(SourceCode(A), mat_vec_mul(A, y), max_free=max_free).value
    return z_hat, (y - z_hat) % A.q
