import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from univhash import types as ty
from univhash.gfq import ResourceGuardError, all_vectors

import oracles


def test_empirical_type_examples():
    assert ty.empirical_type([0, 0, 1, 1], 2).counts == (2, 2)
    assert ty.empirical_type([1, 1, 1], 2).counts == (0, 3)
    assert ty.empirical_type([0, 2, 2, 1, 0, 2], 3).counts == (2, 1, 3)
    with pytest.raises(ValueError):
        ty.empirical_type([0, 3], 3)


def test_distribution_validation():
    with pytest.raises(ValueError):
        ty.Distribution([0.5, 0.6])
    with pytest.raises(ValueError):
        ty.Distribution([1.2, -0.2])
    ty.Distribution([0.5, 0.5 + 5e-10])
    with pytest.raises(ValueError):
        ty.ConditionalDistribution([[0.5, 0.5], [0.2, 0.7]])


def test_entropy_examples():
    assert ty.entropy(ty.Distribution([0.5, 0.5])) == 1.0
    assert ty.entropy(ty.Distribution([1.0, 0.0])) == 0.0
    ref = -0.9 * math.log2(0.9) - 0.1 * math.log2(0.1)
    assert ty.entropy(ty.Distribution([0.9, 0.1])) == pytest.approx(ref, abs=1e-14)
    assert ty.entropy(ty.TypeHistogram((2, 2))) == 1.0


def test_conditional_entropy_examples():
    q = ty.ConditionalDistribution([[0.3, 0.7], [0.3, 0.7]])
    assert ty.conditional_entropy(q, ty.Distribution([0.4, 0.6])) == pytest.approx(
        ty.entropy(ty.Distribution([0.3, 0.7])))
    det = ty.ConditionalDistribution([[1, 0], [0, 1]])
    assert ty.conditional_entropy(det, ty.Distribution([0.5, 0.5])) == 0.0
    # joint counts [u][v] = [[2,1],[0,1]]: sequences u, v realizing it
    u, v = (0, 0, 0, 1), (0, 0, 1, 1)
    J = ty.joint_type(u, v, 2, 2)
    assert J.counts == ((2, 1), (0, 1))
    assert ty.conditional_entropy(J) == pytest.approx(oracles.seq_cond_entropy(u, v), abs=1e-14)
    assert ty.conditional_entropy(J) == pytest.approx(0.5, abs=1e-14)


def test_divergence_examples():
    p = ty.Distribution([0.3, 0.7])
    assert ty.divergence(p, p) == 0.0
    assert ty.divergence(ty.Distribution([1, 0]), ty.Distribution.uniform(2)) == 1.0
    ref = oracles.kl([0.5, 0.5], [0.9, 0.1])
    assert ty.divergence(ty.Distribution([0.5, 0.5]), ty.Distribution([0.9, 0.1])) == pytest.approx(ref, abs=1e-14)
    assert ty.divergence(ty.Distribution([0.5, 0.5]), ty.Distribution([1, 0])) == math.inf


def test_conditional_divergence_and_mi():
    W = ty.ConditionalDistribution.bsc(0.1)
    p = ty.Distribution([0.4, 0.6])
    assert ty.conditional_divergence(W, W, p) == 0.0
    prod = np.outer([0.3, 0.7], [0.6, 0.4])
    assert ty.mutual_information(prod) == pytest.approx(0.0, abs=1e-12)
    J = np.array([[0.4, 0.1], [0.1, 0.4]])
    ref = 2 * oracles.dist_entropy([0.5, 0.5]) - oracles.dist_entropy(J.ravel())
    assert ty.mutual_information(J) == pytest.approx(ref, abs=1e-12)


def test_empirical_mutual_information_identity():
    rng = np.random.default_rng(3)
    for _ in range(50):
        u, v = rng.integers(0, 3, size=(2, 12))
        J = ty.joint_type(u, v, 3, 3)
        lhs = ty.mutual_information(J)
        rhs = (oracles.seq_entropy(tuple(u), 3) + oracles.seq_entropy(tuple(v), 3)
               - oracles.seq_entropy(tuple(zip(u, v)), 9))
        assert abs(lhs - rhs) <= 1e-12


def test_enumerate_types_examples():
    assert len(ty.enumerate_types(4, 2)) == 5
    assert [t.counts for t in ty.enumerate_types(2, 3)] == [
        (0, 0, 2), (0, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 0), (2, 0, 0)]
    for n in range(1, 9):
        for k in (2, 3, 4):
            got = sorted(t.counts for t in ty.enumerate_types(n, k))
            assert len(got) == math.comb(n + k - 1, k - 1) < (n + 1) ** k
            if k ** n <= 6561:
                assert got == oracles.types_by_sequences(n, k)


def test_type_class_size_examples():
    T = ty.TypeHistogram((2, 2))
    assert ty.type_class_size(T) == 6
    lo = 2 ** (4 * (1 - ty.lam(4, 2)))
    assert lo == pytest.approx(0.64, abs=0.01) and lo <= 6 <= 16
    assert ty.type_class_size(ty.TypeHistogram((0, 5))) == 1
    assert ty.type_class_size(ty.TypeHistogram((1, 1, 1))) == 6


@pytest.mark.parametrize("n,k", [(12, 2), (7, 3), (5, 4)])
def test_type_partition(n, k):
    assert sum(ty.type_class_size(T) for T in ty.enumerate_types(n, k)) == k ** n


def test_lambda_and_plus():
    assert ty.lam(1, 2) == 2.0
    assert ty.lam(4, 2) == pytest.approx(2 * math.log2(5) / 4)
    assert ty.lam(4, 2) == pytest.approx(1.1610, abs=1e-4)
    vals = [ty.lam(n, 2) for n in range(2, 2000, 50)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert ty.plus(-1) == 0 and ty.plus(0) == 0 and ty.plus(0.3) == 0.3


def test_count_low_entropy_examples():
    count, log_bound, holds = ty.count_low_entropy(3, 2, ty.TypeHistogram((3, 0)))
    assert count == 2 and holds and log_bound == pytest.approx(3 * ty.lam(3, 2))
    count, _, holds = ty.count_low_entropy(4, 3, ty.Distribution.uniform(3))
    assert count == 81 and holds
    count, _, holds = ty.count_low_entropy(4, 2, ty.TypeHistogram((3, 1)))
    brute = sum(1 for x in oracles.space(4, 2) if oracles.seq_entropy(x, 2) <= oracles.dist_entropy([0.75, 0.25]) + 1e-12)
    assert count == brute == 10 and holds


def test_count_low_entropy_conditional():
    y = (0, 0, 1, 1, 1)
    J = ty.joint_type((0, 1, 1, 1, 0), y, 2, 2)
    count, _, holds = ty.count_low_entropy(5, 2, J, y=y, y_size=2)
    h = oracles.seq_cond_entropy((0, 1, 1, 1, 0), y)
    brute = sum(1 for x in oracles.space(5, 2) if oracles.seq_cond_entropy(x, y) <= h + 1e-12)
    assert count == brute and holds


def test_count_low_entropy_guard():
    with pytest.raises(ResourceGuardError):
        ty.count_low_entropy(30, 2, ty.TypeHistogram((15, 15)))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=4), st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_probability_decomposition(weights, n, seed):
    mu = ty.Distribution(np.array(weights) / sum(weights))
    x = np.random.default_rng(seed).integers(0, mu.size, size=n)
    T = ty.empirical_type(x, mu.size)
    lhs = -ty.sequence_log2_prob(x, mu) / n
    assert abs(lhs - (ty.entropy(T) + ty.divergence(T, mu))) <= 1e-10


def test_conditional_probability_decomposition():
    rng = np.random.default_rng(11)
    for _ in range(200):
        kx, ky, n = 2, 3, int(rng.integers(1, 17))
        W = rng.random((kx, ky)) + 0.05
        W /= W.sum(axis=1, keepdims=True)
        x = rng.integers(0, kx, size=n)
        y = rng.integers(0, ky, size=n)
        lhs = -np.log2(W[x, y]).sum() / n
        J = ty.joint_type(y, x, ky, kx)  # rows indexed by the output symbol
        tx = ty.empirical_type(x, kx).to_distribution()
        cond = ty.conditional_type(ty.joint_type(x, y, kx, ky))
        rhs = ty.conditional_entropy(J) + ty.conditional_divergence(cond, W, tx)
        assert abs(lhs - rhs) <= 1e-10


def test_batch_scores_match_oracle():
    rng = np.random.default_rng(2)
    X = all_vectors(6, 3)
    y = rng.integers(0, 2, size=6)
    mu = ty.Distribution([0.5, 0.3, 0.2])
    H = ty.batch_entropy(X, 3)
    Hc = ty.batch_conditional_entropy(X, y, 3, 2)
    D = ty.batch_divergence(X, mu)
    for i in rng.choice(len(X), 60, replace=False):
        x = tuple(X[i])
        assert H[i] == pytest.approx(oracles.seq_entropy(x, 3), abs=1e-12)
        assert Hc[i] == pytest.approx(oracles.seq_cond_entropy(x, tuple(y)), abs=1e-12)
        assert D[i] == pytest.approx(oracles.seq_divergence(x, mu.probs), abs=1e-12)


def test_divergence_from_counts_infinite():
    mu = ty.Distribution([1.0, 0.0])
    assert ty.batch_divergence(np.array([[0, 1, 0]]), mu)[0] == math.inf
    assert ty.batch_divergence(np.array([[0, 0, 0]]), mu)[0] == 0.0
