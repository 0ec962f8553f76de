"""Empirical distributions (types), entropies and divergences in bits.

Types are kept as exact integer histograms so that two sequences have equal
types iff their histograms compare equal.  All logarithms are base 2,
``0 log 0 = 0``, and a divergence against a distribution that misses
support is ``math.inf`` (never NaN).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from .gfq import ResourceGuardError, all_vectors

PROB_TOL = 1e-9
INF = math.inf

#: Largest ``n log2 |X|`` for which sequences are enumerated exhaustively.
MAX_ENUM_BITS = 24


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability vector over ``{0, ..., k-1}``."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float, copy=True)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("distribution must be a nonempty 1-D vector")
        if (p < 0).any():
            raise ValueError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def size(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, k: int) -> "Distribution":
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def bernoulli(cls, p: float) -> "Distribution":
        return cls([1.0 - p, p])

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __repr__(self):
        return f"Distribution({self.probs.tolist()})"


@dataclass(frozen=True, eq=False)
class ConditionalDistribution:
    """Row ``x`` is the distribution of the output given input symbol ``x``."""

    rows: np.ndarray

    def __post_init__(self):
        W = np.array(self.rows, dtype=float, copy=True)
        if W.ndim != 2:
            raise ValueError("conditional distribution must be a 2-D array")
        for r in W:
            Distribution(r)
        W.setflags(write=False)
        object.__setattr__(self, "rows", W)

    @property
    def in_size(self) -> int:
        return self.rows.shape[0]

    @property
    def out_size(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def bsc(cls, p: float) -> "ConditionalDistribution":
        return cls([[1 - p, p], [p, 1 - p]])

    @classmethod
    def additive(cls, noise: Distribution) -> "ConditionalDistribution":
        """``y = x + z mod q`` with ``z ~ noise``."""
        k = noise.size
        return cls([np.roll(noise.probs, x) for x in range(k)])

    def __repr__(self):
        return f"ConditionalDistribution({self.rows.tolist()})"


@dataclass(frozen=True, order=True)
class TypeHistogram:
    """Counts ``n * nu(a)`` of each symbol ``a``."""

    counts: Tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(v) for v in self.counts)
        if any(v < 0 for v in c):
            raise ValueError("type counts must be nonnegative")
        object.__setattr__(self, "counts", c)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def alphabet_size(self) -> int:
        return len(self.counts)

    def to_distribution(self) -> Distribution:
        return Distribution(np.array(self.counts, dtype=float) / self.n)


@dataclass(frozen=True, order=True)
class JointTypeHistogram:
    """Joint counts ``counts[u][v]`` of a sequence pair ``(u, v)``."""

    counts: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        c = tuple(tuple(int(v) for v in row) for row in self.counts)
        if len({len(r) for r in c}) > 1:
            raise ValueError("joint type rows must have equal length")
        if any(v < 0 for r in c for v in r):
            raise ValueError("type counts must be nonnegative")
        object.__setattr__(self, "counts", c)

    @property
    def n(self) -> int:
        return sum(map(sum, self.counts))

    def array(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.int64)

    def marginal_u(self) -> TypeHistogram:
        return TypeHistogram(self.array().sum(axis=1))

    def marginal_v(self) -> TypeHistogram:
        return TypeHistogram(self.array().sum(axis=0))


# -- empirical types ---------------------------------------------------------

def empirical_type(u, alphabet_size: int) -> TypeHistogram:
    u = np.asarray(u, dtype=np.int64).ravel()
    if u.size == 0:
        raise ValueError("empty sequence has no type")
    if u.min() < 0 or u.max() >= alphabet_size:
        raise ValueError(f"symbol outside alphabet of size {alphabet_size}")
    return TypeHistogram(np.bincount(u, minlength=alphabet_size))


def joint_type(u, v, u_size: int, v_size: int) -> JointTypeHistogram:
    u = np.asarray(u, dtype=np.int64).ravel()
    v = np.asarray(v, dtype=np.int64).ravel()
    if u.shape != v.shape or u.size == 0:
        raise ValueError("sequences must be nonempty and of equal length")
    if u.min() < 0 or u.max() >= u_size or v.min() < 0 or v.max() >= v_size:
        raise ValueError("symbol outside alphabet")
    flat = np.bincount(u * v_size + v, minlength=u_size * v_size)
    return JointTypeHistogram(flat.reshape(u_size, v_size))


# -- information measures ----------------------------------------------------

def _probs(p) -> np.ndarray:
    if isinstance(p, Distribution):
        return p.probs
    if isinstance(p, TypeHistogram):
        return np.array(p.counts, dtype=float) / p.n
    arr = np.asarray(p, dtype=float)
    return arr / arr.sum()


def _h(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(max(-(nz * np.log2(nz)).sum(), 0.0))


def entropy(p: Union[Distribution, TypeHistogram, np.ndarray]) -> float:
    """Shannon entropy in bits; histograms are normalized first."""
    return _h(_probs(p))


def conditional_entropy(q, p: Optional[Distribution] = None) -> float:
    """``H(q|p)`` for a conditional law, or ``H(U|V)`` for a joint type.

    For a :class:`ConditionalDistribution`, row ``v`` is ``q(.|v)`` and ``p``
    weights the rows.  For a :class:`JointTypeHistogram` with counts indexed
    ``[u][v]``, the empirical ``H(u|v)`` is returned and ``p`` is ignored.
    """
    if isinstance(q, JointTypeHistogram):
        J = q.array().astype(float)
        n = J.sum()
        col = J.sum(axis=0)
        return float(max((_xlogx(col).sum() - _xlogx(J).sum()) / n, 0.0))
    W = q.rows if isinstance(q, ConditionalDistribution) else np.asarray(q, float)
    w = _probs(p)
    return float(sum(w[v] * _h(W[v]) for v in range(W.shape[0])))


def _xlogx(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    pos = a > 0
    out[pos] = a[pos] * np.log2(a[pos])
    return out


def divergence(p, p_ref) -> float:
    """``D(p || p_ref)`` in bits; ``inf`` when p is not absolutely continuous."""
    a, b = _probs(p), _probs(p_ref)
    if a.shape != b.shape:
        raise ValueError("distributions over different alphabets")
    pos = a > 0
    if (b[pos] == 0).any():
        return INF
    return float(max((a[pos] * np.log2(a[pos] / b[pos])).sum(), 0.0))


def conditional_divergence(q, q_ref, p) -> float:
    """``D(q || q_ref | p) = sum_v p(v) D(q(.|v) || q_ref(.|v))``."""
    Q = q.rows if isinstance(q, ConditionalDistribution) else np.asarray(q, float)
    Qr = q_ref.rows if isinstance(q_ref, ConditionalDistribution) else np.asarray(q_ref, float)
    w = _probs(p)
    total = 0.0
    for v in range(Q.shape[0]):
        if w[v] == 0:
            continue
        d = divergence(Q[v], Qr[v])
        if d == INF:
            return INF
        total += w[v] * d
    return total


def mutual_information(joint) -> float:
    """``I(U;V) = H(U) + H(V) - H(UV)`` from a joint type or joint law."""
    J = joint.array() if isinstance(joint, JointTypeHistogram) else np.asarray(joint, float)
    J = J / J.sum()
    return max(_h(J.sum(axis=1)) + _h(J.sum(axis=0)) - _h(J.ravel()), 0.0)


def conditional_type(joint: JointTypeHistogram) -> np.ndarray:
    """Rows ``nu_{v|u}``; rows of unseen ``u`` are left uniform."""
    J = joint.array().astype(float)
    tot = J.sum(axis=1, keepdims=True)
    out = np.full_like(J, 1.0 / J.shape[1])
    np.divide(J, tot, out=out, where=tot > 0)
    return out


# -- counting ----------------------------------------------------------------

def compositions(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """All ``k``-part compositions of ``n`` in lexicographic order."""
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def enumerate_types(n: int, alphabet_size: int) -> list:
    if n < 1:
        raise ValueError("n must be positive")
    return [TypeHistogram(c) for c in compositions(n, alphabet_size)]


def enumerate_conditional_types(marginal: TypeHistogram, out_size: int) -> Iterator[JointTypeHistogram]:
    """Joint types ``[u][v]`` whose ``u``-marginal equals ``marginal``."""
    rows = [list(compositions(c, out_size)) for c in marginal.counts]

    def rec(i, acc):
        if i == len(rows):
            yield JointTypeHistogram(acc)
            return
        for r in rows[i]:
            yield from rec(i + 1, acc + (r,))

    yield from rec(0, ())


def type_class_size(T: TypeHistogram) -> int:
    """Multinomial ``n! / prod(counts!)``, exact."""
    size = math.factorial(T.n)
    for c in T.counts:
        size //= math.factorial(c)
    return size


def lam(n: int, alphabet_size: int) -> float:
    """``|U| log2(n+1) / n``; pass ``|X||Y|`` for a product alphabet."""
    if n < 1:
        raise ValueError("n must be positive")
    return alphabet_size * math.log2(n + 1) / n


def plus(theta: float) -> float:
    return theta if theta > 0 else 0.0


@lru_cache(maxsize=256)
def _sorted_scores(n: int, x_size: int, y: Optional[tuple], y_size: int) -> np.ndarray:
    X = all_vectors(n, x_size)
    if y is None:
        out = np.sort(batch_entropy(X, x_size))
    else:
        out = np.sort(batch_conditional_entropy(X, np.array(y), x_size, y_size))
    out.setflags(write=False)
    return out


def count_low_entropy(n: int, x_size: int, threshold, y=None,
                      y_size: Optional[int] = None, tol: float = 1e-12):
    """Exact ``|{x' : H(x') <= H(U)}|`` and whether the type-counting bound holds.

    With ``y`` given, ``threshold`` is a joint type ``[u][v]`` and the
    count is ``|{x' : H(x'|y) <= H(U|V)}|`` against
    ``2**(n [H(U|V) + lam(n, |X||Y|)])``.  Returns ``(count, log2_bound, holds)``.
    """
    if n * math.log2(x_size) > MAX_ENUM_BITS:
        raise ResourceGuardError(f"{x_size}^{n} sequences exceed the enumeration guard")
    if y is None:
        h = entropy(threshold)
        scores = _sorted_scores(n, x_size, None, 0)
        log_bound = n * (h + lam(n, x_size))
    else:
        y = tuple(int(v) for v in y)
        if len(y) != n:
            raise ValueError("conditioning sequence must have length n")
        y_size = y_size or max(y) + 1
        h = conditional_entropy(threshold)
        scores = _sorted_scores(n, x_size, y, y_size)
        log_bound = n * (h + lam(n, x_size * y_size))
    count = int(np.searchsorted(scores, h + tol, side="right"))
    return count, log_bound, math.log2(count) <= log_bound + tol if count else True


# -- batched empirical entropies --------------------------------------------

@lru_cache(maxsize=64)
def _xlogx_table(n: int) -> np.ndarray:
    c = np.arange(n + 1, dtype=float)
    return _xlogx(c)


def batch_entropy(X: np.ndarray, alphabet_size: int) -> np.ndarray:
    """Empirical entropy of each row of ``X``."""
    X = np.atleast_2d(X)
    n = X.shape[1]
    t = _xlogx_table(n)
    acc = np.zeros(X.shape[0])
    for a in range(alphabet_size):
        acc += t[(X == a).sum(axis=1)]
    return np.maximum(math.log2(n) - acc / n, 0.0)


def batch_conditional_entropy(X: np.ndarray, y, x_size: int, y_size: int) -> np.ndarray:
    """Empirical ``H(x|y)`` for each row ``x`` of ``X`` against one ``y``."""
    X = np.atleast_2d(X)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[1]
    t = _xlogx_table(n)
    acc = np.zeros(X.shape[0])
    for b in range(y_size):
        cols = y == b
        nb = int(cols.sum())
        if nb == 0:
            continue
        acc += t[nb]
        sub = X[:, cols]
        for a in range(x_size):
            acc -= t[(sub == a).sum(axis=1)]
    return np.maximum(acc / n, 0.0)


def batch_divergence(X: np.ndarray, mu: Distribution) -> np.ndarray:
    """``D(nu_x || mu)`` for each row ``x`` of ``X``."""
    X = np.atleast_2d(X)
    n = X.shape[1]
    counts = np.stack([(X == a).sum(axis=1) for a in range(mu.size)], axis=1)
    return divergence_from_counts(counts, mu, n)


def divergence_from_counts(counts: np.ndarray, mu: Distribution, n: int) -> np.ndarray:
    counts = np.atleast_2d(counts)
    p = mu.probs
    t = _xlogx_table(n)
    with np.errstate(divide="ignore"):
        logp = np.log2(p)
    out = np.zeros(counts.shape[0])
    bad = np.zeros(counts.shape[0], dtype=bool)
    for a in range(mu.size):
        c = counts[:, a]
        if p[a] == 0:
            bad |= c > 0
            continue
        out += t[c] - c * logp[a]
    out = np.maximum(out / n - math.log2(n), 0.0)
    out[bad] = INF
    return out


def sequence_log2_prob(x, mu: Distribution) -> float:
    """``log2 mu(x)`` of an i.i.d. sequence."""
    x = np.asarray(x, dtype=np.int64)
    with np.errstate(divide="ignore"):
        return float(np.log2(mu.probs)[x].sum())
