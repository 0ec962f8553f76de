"""Random matrix ensembles and empirical hash-property statistics.

Two ensembles are provided: the sparse ensemble (each column receives
``tau`` random nonzero additions at random rows) and the uniform ensemble of
all linear maps.  Seeds are split with :func:`derive_rng` so that parallel
workers draw independent, reproducible streams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .gfq import (FieldMatrix, ResourceGuardError, as_vector, check_modulus,
                  coefficient_grid, image_size)

#: Upper bound on ``log2`` of the number of ensemble members enumerated exactly.
MAX_ENSEMBLE_BITS = 24


def derive_rng(base_seed: int, *index: int) -> np.random.Generator:
    """Independent generator for worker/trial ``index`` under ``base_seed``.

    The splitting rule is ``SeedSequence([base_seed, *index])``.
    """
    return np.random.default_rng(np.random.SeedSequence([int(base_seed), *map(int, index)]))


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class SparseEnsembleSpec:
    n: int
    l: int
    q: int = 2
    tau: int = 3
    seed: int = 0

    def __post_init__(self):
        check_modulus(self.q)
        if self.n < 1 or self.l < 1 or self.tau < 1:
            raise ValueError(f"need n, l, tau >= 1; got {self.n}, {self.l}, {self.tau}")

    @property
    def kind(self) -> str:
        return "sparse"

    def sample(self, rng=None) -> FieldMatrix:
        return sample_sparse(self, rng)

    def enumerate_members(self):
        """Yield every equally likely draw sequence's matrix (may repeat)."""
        choices = self.l * (self.q - 1)
        draws = self.n * self.tau
        if draws * math.log2(choices) > MAX_ENSEMBLE_BITS + 1e-9:
            raise ResourceGuardError("sparse ensemble too large to enumerate")
        # coefficient_grid needs a base >= 2; a single choice means a single member
        grid = coefficient_grid(draws, max(choices, 2))
        for seq in grid[: choices ** draws]:
            yield _matrix_from_draws(self, seq.reshape(self.n, self.tau))


@dataclass(frozen=True)
class AllLinearSpec:
    n: int
    l: int
    q: int = 2
    seed: int = 0

    def __post_init__(self):
        check_modulus(self.q)
        if self.n < 1 or self.l < 1:
            raise ValueError(f"need n, l >= 1; got {self.n}, {self.l}")

    @property
    def kind(self) -> str:
        return "all_linear"

    def sample(self, rng=None) -> FieldMatrix:
        rng = _as_rng(self.seed if rng is None else rng)
        return FieldMatrix(rng.integers(0, self.q, size=(self.l, self.n)), self.q)

    def enumerate_members(self):
        bits = self.l * self.n * math.log2(self.q)
        if bits > MAX_ENSEMBLE_BITS + 1e-9:
            raise ResourceGuardError(f"{bits:.0f}-bit ensemble exceeds the enumeration guard")
        for flat in coefficient_grid(self.l * self.n, self.q):
            yield FieldMatrix(flat.reshape(self.l, self.n), self.q)


EnsembleKind = Union[SparseEnsembleSpec, AllLinearSpec]


def make_ensemble(kind: str, n: int, l: int, q: int = 2, tau: int = 3,
                  seed: int = 0) -> EnsembleKind:
    if kind == "sparse":
        return SparseEnsembleSpec(n, l, q, tau, seed)
    if kind in ("all_linear", "all-linear", "linear"):
        return AllLinearSpec(n, l, q, seed)
    raise ValueError(f"unknown ensemble kind {kind!r}")


def sparse_draws(spec: SparseEnsembleSpec, rng=None) -> np.ndarray:
    """The ``(n, tau)`` array of joint ``(row, value)`` draw indices.

    Entry ``k`` encodes row ``k // (q-1)`` and value ``1 + k % (q-1)``.  Draws
    are made column by column, repetition innermost.
    """
    rng = _as_rng(spec.seed if rng is None else rng)
    return rng.integers(0, spec.l * (spec.q - 1), size=(spec.n, spec.tau))


def _matrix_from_draws(spec: SparseEnsembleSpec, draws: np.ndarray) -> FieldMatrix:
    A = np.zeros((spec.l, spec.n), dtype=np.int64)
    rows = draws // (spec.q - 1)
    vals = 1 + draws % (spec.q - 1)
    for i in range(spec.n):
        for j, a in zip(rows[i], vals[i]):
            A[j, i] += a
    return FieldMatrix(A % spec.q, spec.q)


def sample_sparse(spec: SparseEnsembleSpec, rng=None) -> FieldMatrix:
    """Start from zero; for each column add ``tau`` random nonzero values at random rows."""
    return _matrix_from_draws(spec, sparse_draws(spec, rng))


def ensemble_image_size(spec: EnsembleKind, samples: int = 32, rng=None) -> int:
    """``|Im A|`` of the ensemble, taken as the largest image over sampled members.

    For the all-linear ensemble this is exactly ``q**l``.
    """
    if isinstance(spec, AllLinearSpec):
        return spec.q ** spec.l
    rng = _as_rng(spec.seed if rng is None else rng)
    return max(image_size(spec.sample(rng)) for _ in range(samples))


# -- collision statistics ----------------------------------------------------

def collision_prob(spec: EnsembleKind, u, u_other, mode: str = "exhaustive",
                   trials: int = 10_000, seed: Optional[int] = None) -> float:
    """``P_A(A u = A u')`` exactly (``mode="exhaustive"``) or by Monte Carlo."""
    u = as_vector(u, spec.q)
    u_other = as_vector(u_other, spec.q)
    if u.shape != (spec.n,) or u_other.shape != (spec.n,):
        raise ValueError(f"vectors must have length {spec.n}")
    d = (u - u_other) % spec.q
    if not d.any():
        raise ValueError("collision probability needs u != u'")
    if mode == "exhaustive":
        hits = total = 0
        for A in spec.enumerate_members():
            hits += not (A.data @ d % spec.q).any()
            total += 1
        return hits / total
    if mode == "montecarlo":
        rng = _as_rng(spec.seed if seed is None else seed)
        hits = sum(not (spec.sample(rng).data @ d % spec.q).any() for _ in range(trials))
        return hits / trials
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class HashEstimate:
    alpha_hat: float
    beta_hat: float
    trials: int
    image_size_used: int
    pairs: int = 0


def estimate_alpha_beta(spec: EnsembleKind, pair_sample_size: int = 64,
                        trials: int = 2000, seed: int = 0) -> HashEstimate:
    """Empirical ``(alpha, beta)`` restricted to singleton sets.

    Collision frequencies of ``pair_sample_size`` random distinct pairs are
    measured over ``trials`` sampled matrices (shared by all pairs).
    ``alpha_hat = |Im| * mean`` and ``beta_hat`` is the worst pair's excess
    over ``alpha_hat / |Im|``, clipped at zero.
    """
    if pair_sample_size < 1 or trials < 1:
        raise ValueError("sample sizes must be positive")
    rng = derive_rng(seed, 0)
    q, n = spec.q, spec.n
    U = rng.integers(0, q, size=(pair_sample_size, n))
    D = rng.integers(0, q, size=(pair_sample_size, n))
    for k in range(pair_sample_size):
        while not D[k].any():
            D[k] = rng.integers(0, q, size=n)
    hits = np.zeros(pair_sample_size)
    mrng = derive_rng(seed, 1)
    im = 0
    for _ in range(trials):
        A = spec.sample(mrng)
        hits += ~((D @ A.data.T) % q).any(axis=1)
        im = max(im, image_size(A))
    if isinstance(spec, AllLinearSpec):
        im = q ** spec.l
    freq = hits / trials
    alpha = im * freq.mean()
    beta = max(0.0, float(freq.max() - alpha / im))
    return HashEstimate(float(alpha), beta, trials, int(im), pair_sample_size)


def combine_alpha_beta(a: Tuple[float, float], b: Tuple[float, float]) -> Tuple[float, float]:
    """Hash parameters of ``u -> (A u, B u)`` from those of ``A`` and ``B``."""
    (alpha_a, beta_a), (alpha_b, beta_b) = a, b
    if min(alpha_a, beta_a, alpha_b, beta_b) < 0:
        raise ValueError("hash parameters must be nonnegative")
    return alpha_a * alpha_b, min(beta_a, beta_b)


def kappa(beta_a: float, xi: float, n: int, beta_is_small_o: bool) -> float:
    """``n**xi`` when ``beta_A(n) = o(n**-xi)``, otherwise ``1/sqrt(beta_A(n))``."""
    if beta_a < 0 or xi <= 0 or n < 1:
        raise ValueError("need beta >= 0, xi > 0, n >= 1")
    if beta_is_small_o:
        return float(n) ** xi
    if beta_a == 0:
        raise ZeroDivisionError("beta_A(n) = 0 requires the o(n^-xi) branch")
    return 1.0 / math.sqrt(beta_a)
