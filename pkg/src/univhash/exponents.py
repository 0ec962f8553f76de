"""Error exponents minimized exactly over length-n types, and bound evaluation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import types as ty
from .gfq import ResourceGuardError

#: Cap on the number of (joint) types visited by one minimization.
MAX_TYPES = 2_000_000

# differences this small are rounding, not rate gaps
_SNAP = 1e-12


def _gap(rate: float, h: float) -> float:
    d = rate - h
    return d if d > _SNAP else 0.0


@dataclass(frozen=True)
class ExponentResult:
    value: float
    argmin_type: Union[ty.TypeHistogram, ty.JointTypeHistogram]
    n_used: int


@dataclass(frozen=True)
class BoundInputs:
    n: int
    l_a: int = 0
    alpha: float = 1.0
    beta: float = 0.0
    image_size: int = 1
    kappa: Optional[float] = None
    alpha_ab: float = 1.0
    beta_ab: float = 0.0

    def __post_init__(self):
        if min(self.alpha, self.beta, self.alpha_ab, self.beta_ab) < 0:
            raise ValueError("hash parameters must be nonnegative")
        if self.image_size < 1 or self.n < 1 or self.l_a < 0:
            raise ValueError("need image_size >= 1, n >= 1, l_a >= 0")


def _type_count(n: int, k: int) -> int:
    return math.comb(n + k - 1, k - 1)


def exponent_source(mu_x: ty.Distribution, rate: float, n: int) -> ExponentResult:
    """``min_U [D(U || mu_X) + |R - H(U)|^+]`` over the types of length ``n``."""
    k = mu_x.size
    if not -_SNAP <= rate <= math.log2(k) + _SNAP:
        raise ValueError(f"rate {rate} outside [0, log2 {k}]")
    if _type_count(n, k) > MAX_TYPES:
        raise ResourceGuardError("too many types to enumerate")
    best, best_t = math.inf, None
    for T in ty.enumerate_types(n, k):
        v = ty.divergence(T, mu_x) + _gap(rate, ty.entropy(T))
        if v < best:
            best, best_t = v, T
    return ExponentResult(float(best), best_t, n)


def closest_type(mu_x: ty.Distribution, n: int) -> ty.TypeHistogram:
    """Length-``n`` type minimizing ``D(U || mu_X)``; ties go to the smallest counts tuple."""
    best, best_t = math.inf, None
    for T in ty.enumerate_types(n, mu_x.size):
        d = ty.divergence(T, mu_x)
        if d < best - _SNAP or best_t is None:
            best, best_t = d, T
    return best_t


def exponent_channel(mu_yx: ty.ConditionalDistribution, mu_x: ty.Distribution,
                     rate_a: float, n: int) -> ExponentResult:
    """``min_{V|U} [D(V|U || mu_{Y|X} | U) + |R_A - H(U|V)|^+]`` with ``U`` the closest type to ``mu_X``."""
    if mu_yx.in_size != mu_x.size:
        raise ValueError("channel input alphabet does not match mu_X")
    kx, ky = mu_yx.in_size, mu_yx.out_size
    if _type_count(n, kx) * _type_count(n, ky) ** kx > MAX_TYPES:
        raise ResourceGuardError("too many conditional types to enumerate")
    U = closest_type(mu_x, n)
    W = mu_yx.rows
    best, best_j = math.inf, None
    for J in ty.enumerate_conditional_types(U, ky):
        cond = ty.conditional_type(J)
        d = ty.conditional_divergence(cond, W, U)
        v = d + _gap(rate_a, ty.conditional_entropy(J))
        if v < best:
            best, best_j = v, J
    return ExponentResult(float(best), best_j, n)


def bound_source_rhs(b: BoundInputs, exponent: float, q: int) -> float:
    """``max(alpha q^l / |Im|, 1) 2^{-n[F - 2 lambda]} + beta``; may exceed 1."""
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    lead = max(b.alpha * q ** b.l_a / b.image_size, 1.0)
    return lead * 2.0 ** (-b.n * (exponent - 2 * ty.lam(b.n, q))) + b.beta


def bound_channel_rhs(b: BoundInputs, exponent: float, x_size: int, y_size: int) -> float:
    """``alpha_AB - 1 + (beta_AB + 1)/kappa + 2 kappa [max(alpha_A, 1) 2^{-n[F - 2 lambda_XY]} + beta_A]``."""
    if b.kappa is None or b.kappa <= 0:
        raise ValueError("kappa must be positive")
    lam = ty.lam(b.n, x_size * y_size)
    tail = max(b.alpha, 1.0) * 2.0 ** (-b.n * (exponent - 2 * lam)) + b.beta
    return b.alpha_ab - 1 + (b.beta_ab + 1) / b.kappa + 2 * b.kappa * tail


def is_vacuous(rhs: float) -> bool:
    return not rhs < 1.0


def exponent_sweep(mu_x: ty.Distribution, rates, n: int):
    """Rows ``(R, F, argmin counts)`` for each rate."""
    out = []
    for r in np.atleast_1d(rates):
        res = exponent_source(mu_x, float(r), n)
        out.append((float(r), res.value, res.argmin_type.counts))
    return out
