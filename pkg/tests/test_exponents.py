import math

import numpy as np
import pytest

from univhash import exponents as ex
from univhash import types as ty
from univhash.ensembles import kappa
from univhash.gfq import ResourceGuardError

import oracles


def test_source_exponent_uniform_is_zero():
    for n in (2, 4, 8, 12):
        res = ex.exponent_source(ty.Distribution.uniform(2), 1.0, n)
        assert res.value == 0.0
        assert res.argmin_type.counts == (n // 2, n // 2)
    assert ex.exponent_source(ty.Distribution.uniform(3), math.log2(3), 6).value == 0.0


def test_source_exponent_point_mass():
    res = ex.exponent_source(ty.Distribution([1.0, 0.0]), 0.4, 9)
    assert res.value == pytest.approx(0.4, abs=1e-15)
    assert res.argmin_type.counts == (9, 0)


@pytest.mark.parametrize("mu,rate,n", [
    ([0.9, 0.1], 0.75, 8),
    ([0.89, 0.11], 0.6, 12),
    ([0.5, 0.3, 0.2], 1.2, 6),
])
def test_source_exponent_matches_oracle(mu, rate, n):
    got = ex.exponent_source(ty.Distribution(mu), rate, n).value
    assert abs(got - oracles.source_exponent(mu, rate, n)) <= 1e-12


def test_source_exponent_rate_range():
    with pytest.raises(ValueError):
        ex.exponent_source(ty.Distribution.uniform(2), 1.5, 4)


def test_source_exponent_guard():
    with pytest.raises(ResourceGuardError):
        ex.exponent_source(ty.Distribution.uniform(8), 1.0, 200)


def test_channel_exponent_identity():
    W = ty.ConditionalDistribution([[1, 0], [0, 1]])
    for r in (0.1, 0.45, 0.9):
        assert ex.exponent_channel(W, ty.Distribution.uniform(2), r, 8).value == r


def test_channel_exponent_zero_rate_realizable():
    W = ty.ConditionalDistribution.bsc(0.25)
    assert ex.exponent_channel(W, ty.Distribution.uniform(2), 0.0, 8).value == 0.0


@pytest.mark.parametrize("p,rate,n", [(0.1, 0.6, 8), (0.05, 0.45, 10)])
def test_channel_exponent_matches_oracle(p, rate, n):
    W = ty.ConditionalDistribution.bsc(p)
    got = ex.exponent_channel(W, ty.Distribution.uniform(2), rate, n).value
    assert abs(got - oracles.channel_exponent(W.rows.tolist(), [0.5, 0.5], rate, n)) <= 1e-12


def test_channel_exponent_nonuniform_input():
    W = ty.ConditionalDistribution([[0.8, 0.2], [0.3, 0.7]])
    mu = ty.Distribution([0.7, 0.3])
    got = ex.exponent_channel(W, mu, 0.5, 7).value
    assert abs(got - oracles.channel_exponent(W.rows.tolist(), [0.7, 0.3], 0.5, 7)) <= 1e-12


def test_closest_type():
    assert ex.closest_type(ty.Distribution([0.7, 0.3]), 10).counts == (7, 3)
    assert ex.closest_type(ty.Distribution.uniform(2), 3).counts == (1, 2)


def test_monotone_under_refinement():
    mu = ty.Distribution([0.83, 0.17])
    for r in (0.5, 0.7, 0.9):
        for n in (4, 8):
            assert ex.exponent_source(mu, r, 2 * n).value <= ex.exponent_source(mu, r, n).value + 1e-15


def test_exact_type_with_enough_entropy_gives_zero():
    mu = ty.Distribution([0.75, 0.25])
    assert ex.exponent_source(mu, 0.8, 8).value == 0.0


def test_positive_below_entropy_gap():
    for p in np.linspace(0.02, 0.2, 10):
        mu = ty.Distribution.bernoulli(float(p))
        r = ty.entropy(mu) + 0.1
        assert ex.exponent_source(mu, r, 10).value > 0


def test_source_bound_examples():
    b = ex.BoundInputs(n=16, l_a=8, image_size=2 ** 8)
    F = 0.7
    assert ex.bound_source_rhs(b, F, 2) == pytest.approx(2 ** (-16 * (F - 2 * ty.lam(16, 2))))
    assert ex.is_vacuous(ex.bound_source_rhs(b, 2 * ty.lam(16, 2), 2))
    b = ex.BoundInputs(n=32, l_a=24, alpha=1.05, beta=1e-3, image_size=2 ** 24)
    ref = 1.05 * 2 ** (-32 * (0.9 - 2 * 2 * math.log2(33) / 32)) + 1e-3
    assert ex.bound_source_rhs(b, 0.9, 2) == pytest.approx(ref, rel=1e-12)
    # a smaller image raises the leading factor
    b = ex.BoundInputs(n=32, l_a=24, alpha=1.05, beta=1e-3, image_size=2 ** 23)
    assert ex.bound_source_rhs(b, 0.9, 2) == pytest.approx(2.1 * (ref - 1e-3) / 1.05 + 1e-3, rel=1e-12)


def test_channel_bound_examples():
    k = kappa(1 / 16, 1, 16, beta_is_small_o=False)
    assert k == 4
    b = ex.BoundInputs(n=16, kappa=k)
    F = 1.5
    lam = 4 * math.log2(17) / 16
    assert ex.bound_channel_rhs(b, F, 2, 2) == pytest.approx(1 / 4 + 8 * 2 ** (-16 * (F - 2 * lam)))
    b = ex.BoundInputs(n=48, alpha=1.1, beta=0.002, kappa=7.0, alpha_ab=1.21, beta_ab=0.002)
    lam = 4 * math.log2(49) / 48
    ref = 1.21 - 1 + 1.002 / 7 + 14 * (1.1 * 2 ** (-48 * (0.6 - 2 * lam)) + 0.002)
    assert ex.bound_channel_rhs(b, 0.6, 2, 2) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(ValueError):
        ex.bound_channel_rhs(ex.BoundInputs(n=4, kappa=0.0), 1.0, 2, 2)


def test_bounds_nonnegative_and_decreasing_in_f():
    b = ex.BoundInputs(n=20, l_a=10, alpha=1.2, beta=0.01, image_size=2 ** 10, kappa=3.0)
    src = [ex.bound_source_rhs(b, F, 2) for F in np.linspace(0, 2, 9)]
    ch = [ex.bound_channel_rhs(b, F, 2, 2) for F in np.linspace(0, 2, 9)]
    for vals in (src, ch):
        assert all(v >= 0 for v in vals)
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_bound_inputs_validation():
    with pytest.raises(ValueError):
        ex.BoundInputs(n=4, alpha=-1)
    with pytest.raises(ValueError):
        ex.BoundInputs(n=4, image_size=0)


def test_exponent_sweep():
    rows = ex.exponent_sweep(ty.Distribution.bernoulli(0.11), [0.6, 0.75, 0.9], 8)
    assert [r[0] for r in rows] == [0.6, 0.75, 0.9]
    assert all(a[1] <= b[1] for a, b in zip(rows, rows[1:]))
