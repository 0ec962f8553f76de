"""Linear algebra over GF(q) for prime q.

Vectors are 1-D integer numpy arrays with entries in ``[0, q)``; batches of
vectors are 2-D arrays with one vector per row.  Matrices are wrapped in
:class:`FieldMatrix`, which carries the modulus alongside a dense grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Tuple, Union

import numpy as np

#: Refuse to enumerate cosets with more free dimensions than this.
MAX_FREE_DIMS = 24


class DimensionError(ValueError):
    """Shapes or moduli of the operands do not agree."""


class ResourceGuardError(RuntimeError):
    """An exhaustive enumeration would exceed its declared guard."""


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, int(q**0.5) + 1))


def check_modulus(q: int) -> int:
    q = int(q)
    if not is_prime(q):
        raise ValueError(f"modulus must be a prime >= 2, got {q}")
    return q


@dataclass(frozen=True)
class FieldElem:
    """A single element of GF(q)."""

    value: int
    q: int

    def __post_init__(self):
        check_modulus(self.q)
        if not 0 <= self.value < self.q:
            raise ValueError(f"{self.value} is not in GF({self.q})")

    def __add__(self, other: "FieldElem") -> "FieldElem":
        _same_q(self.q, other.q)
        return FieldElem((self.value + other.value) % self.q, self.q)

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        _same_q(self.q, other.q)
        return FieldElem((self.value * other.value) % self.q, self.q)


def _same_q(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"modulus mismatch: {a} vs {b}")


def as_vector(u, q: int) -> np.ndarray:
    """Validate ``u`` as a vector (or batch of vectors) over GF(q)."""
    arr = np.asarray(u, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= q):
        raise ValueError(f"entries must lie in [0, {q})")
    return arr


@dataclass(frozen=True, eq=False)
class FieldMatrix:
    """An ``l x n`` matrix over GF(q), stored densely.

    Zero-row matrices are allowed; they represent the constant map onto the
    empty vector (the whole space is a single coset).
    """

    data: np.ndarray
    q: int
    _rank: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        check_modulus(self.q)
        arr = np.array(self.data, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise DimensionError("matrix data must be 2-D")
        if arr.shape[1] < 1:
            raise DimensionError("matrix needs at least one column")
        arr %= self.q
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @classmethod
    def zeros(cls, rows: int, cols: int, q: int) -> "FieldMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), q)

    @classmethod
    def identity(cls, n: int, q: int) -> "FieldMatrix":
        return cls(np.eye(n, dtype=np.int64), q)

    @classmethod
    def from_triples(cls, rows: int, cols: int, q: int,
                     triples: Iterable[Tuple[int, int, int]]) -> "FieldMatrix":
        """Build from ``(row, col, value)`` triples; repeated positions add up."""
        arr = np.zeros((rows, cols), dtype=np.int64)
        for r, c, v in triples:
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionError(f"triple ({r}, {c}) outside {rows}x{cols}")
            arr[r, c] = (arr[r, c] + v) % q
        return cls(arr, q)

    def triples(self) -> list:
        """Nonzero entries as ``(row, col, value)``, row-major."""
        r, c = np.nonzero(self.data)
        return [(int(i), int(j), int(self.data[i, j])) for i, j in zip(r, c)]

    def rank(self) -> int:
        # cached: the data is immutable
        if not self._rank:
            self._rank.append(rank(self))
        return self._rank[0]

    def __matmul__(self, u):
        return mat_vec_mul(self, u)

    def __eq__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.q, self.data.shape, self.data.tobytes()))


def mat_vec_mul(A: FieldMatrix, u) -> np.ndarray:
    """Return ``A u`` over GF(q).  ``u`` may be a batch with one vector per row."""
    u = as_vector(u, A.q)
    if u.shape[-1] != A.cols:
        raise DimensionError(f"vector length {u.shape[-1]} != matrix cols {A.cols}")
    return (u @ A.data.T) % A.q


def _row_reduce(M: np.ndarray, q: int, ncols: Optional[int] = None):
    """Reduced row echelon form mod q; pivots searched in the first ``ncols``."""
    M = np.array(M, dtype=np.int64) % q
    m, n = M.shape
    ncols = n if ncols is None else ncols
    pivots = []
    row = 0
    for col in range(ncols):
        if row == m:
            break
        nz = np.nonzero(M[row:, col])[0]
        if nz.size == 0:
            continue
        p = row + nz[0]
        if p != row:
            M[[row, p]] = M[[p, row]]
        inv = pow(int(M[row, col]), -1, q)
        M[row] = (M[row] * inv) % q
        others = np.nonzero(M[:, col])[0]
        others = others[others != row]
        if others.size:
            M[others] = (M[others] - np.outer(M[others, col], M[row])) % q
        pivots.append(col)
        row += 1
    return M, pivots


def rank(A: FieldMatrix) -> int:
    if A.rows == 0:
        return 0
    return len(_row_reduce(A.data, A.q)[1])


def nullspace(A: FieldMatrix) -> np.ndarray:
    """Basis of ``{u : A u = 0}`` as rows of a ``(n - rank) x n`` array."""
    n = A.cols
    if A.rows == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = _row_reduce(A.data, A.q)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, p in enumerate(pivots):
            basis[k, p] = (-R[r, f]) % A.q
    return basis


@dataclass(frozen=True, eq=False)
class Coset:
    """The affine set ``particular + span(basis)`` over GF(q)."""

    particular: np.ndarray
    basis: np.ndarray
    q: int

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def n(self) -> int:
        return self.particular.shape[0]

    def size(self) -> int:
        return self.q ** self.dim

    def members(self, max_free: int = MAX_FREE_DIMS) -> np.ndarray:
        """All members as a ``(q**dim, n)`` array (unordered)."""
        if self.dim > max_free:
            raise ResourceGuardError(
                f"coset has {self.dim} free dimensions (guard {max_free})")
        coeffs = coefficient_grid(self.dim, self.q)
        return (self.particular + coeffs @ self.basis) % self.q

    def __contains__(self, u) -> bool:
        # u - particular must lie in the row space of basis
        diff = (np.asarray(u, dtype=np.int64) - self.particular) % self.q
        if self.dim == 0:
            return not diff.any()
        stacked = np.vstack([self.basis, diff])
        return len(_row_reduce(stacked, self.q)[1]) == self.dim


def coefficient_grid(k: int, q: int) -> np.ndarray:
    """Every vector of GF(q)^k, one per row, in lexicographic order."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(q**k, dtype=np.int64)
    powers = q ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers) % q


def all_vectors(n: int, q: int, max_bits: float = MAX_FREE_DIMS) -> np.ndarray:
    """All of GF(q)^n in lexicographic order, guarded on ``n log2 q``."""
    if n * np.log2(q) > max_bits + 1e-9:
        raise ResourceGuardError(f"GF({q})^{n} exceeds the {max_bits}-bit guard")
    return coefficient_grid(n, q)


def solve_affine(A: FieldMatrix, c) -> Optional[Coset]:
    """Solution set of ``A u = c``, or ``None`` when the system is inconsistent."""
    c = as_vector(c, A.q)
    if c.shape != (A.rows,):
        raise DimensionError(f"right-hand side length {c.shape} != rows {A.rows}")
    n = A.cols
    basis = nullspace(A)
    if A.rows == 0:
        return Coset(np.zeros(n, dtype=np.int64), basis, A.q)
    aug = np.hstack([A.data, c[:, None]])
    R, pivots = _row_reduce(aug, A.q, ncols=n)
    if R[len(pivots):, n].any():
        return None
    particular = np.zeros(n, dtype=np.int64)
    for r, p in enumerate(pivots):
        particular[p] = R[r, n]
    return Coset(particular, basis, A.q)


class AffineSolver:
    """Precomputed elimination of ``A`` for solving ``A u = c`` for many ``c``."""

    def __init__(self, A: FieldMatrix):
        self.A = A
        q, l, n = A.q, A.rows, A.cols
        aug = np.hstack([A.data, np.eye(l, dtype=np.int64)])
        R, self.pivots = _row_reduce(aug, q, ncols=n)
        self.rank = len(self.pivots)
        # R[:, n:] is the transform T with T A = R[:, :n]
        self.transform = R[:, n:]
        self.basis = nullspace(A)

    def solve(self, c) -> Tuple[np.ndarray, np.ndarray]:
        """Particular solutions (one row per ``c``) and a consistency mask."""
        c = as_vector(c, self.A.q)
        batch = np.atleast_2d(c)
        if batch.shape[1] != self.A.rows:
            raise DimensionError(f"right-hand side length {batch.shape[1]} != rows {self.A.rows}")
        t = (batch @ self.transform.T) % self.A.q
        ok = ~t[:, self.rank:].any(axis=1)
        sol = np.zeros((batch.shape[0], self.A.cols), dtype=np.int64)
        sol[:, self.pivots] = t[:, : self.rank]
        if c.ndim == 1:
            return sol[0], ok[0]
        return sol, ok

    def coset(self, c) -> Optional[Coset]:
        sol, ok = self.solve(c)
        return Coset(sol, self.basis, self.A.q) if ok else None


def stack(A: FieldMatrix, B: FieldMatrix) -> FieldMatrix:
    """The matrix of ``u -> (A u, B u)``."""
    _same_q(A.q, B.q)
    if A.cols != B.cols:
        raise DimensionError(f"column mismatch: {A.cols} vs {B.cols}")
    return FieldMatrix(np.vstack([A.data, B.data]), A.q)


def image_size(A: FieldMatrix) -> int:
    """``|Im A| = q**rank(A)`` as an exact integer."""
    return A.q ** A.rank()


def image_contains(A: FieldMatrix, c) -> bool:
    return solve_affine(A, c) is not None


def lex_key(X: np.ndarray, q: int) -> np.ndarray:
    """Integer keys whose order is the lexicographic order of the rows of X."""
    n = X.shape[-1]
    if n * np.log2(q) >= 63:
        raise ResourceGuardError("rows too long for integer lexicographic keys")
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return X.astype(np.int64) @ powers


# -- matrix text format ------------------------------------------------------

def triple_text(A: FieldMatrix) -> str:
    """``q l n`` followed by one ``row col value`` triple per line."""
    lines = [f"{A.q} {A.rows} {A.cols}"]
    lines += [f"{r} {c} {v}" for r, c, v in A.triples()]
    return "\n".join(lines) + "\n"


def write_matrix(A: FieldMatrix, path: Union[str, Path]) -> None:
    Path(path).write_text(triple_text(A))


def read_matrix(path: Union[str, Path]) -> FieldMatrix:
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 3:
        raise ValueError(f"{path}: line 1: expected header 'q l n'")
    q, l, n = (int(t) for t in lines[0])
    triples = []
    for k, tok in enumerate(lines[1:], start=2):
        if len(tok) != 3:
            raise ValueError(f"{path}: line {k}: expected 'row col value'")
        r, c, v = (int(t) for t in tok)
        if not 0 <= v < q:
            raise ValueError(f"{path}: line {k}: value {v} not in GF({q})")
        triples.append((r, c, v))
    return FieldMatrix.from_triples(l, n, q, triples)


def dense_text(A: FieldMatrix) -> str:
    """``l`` lines of ``n`` space-separated digits."""
    return "\n".join(" ".join(str(int(v)) for v in row) for row in A.data)


def parse_dense(text: str, q: int) -> FieldMatrix:
    rows = [[int(t) for t in ln.split()] for ln in text.splitlines() if ln.strip()]
    return FieldMatrix(np.array(rows, dtype=np.int64), q)
