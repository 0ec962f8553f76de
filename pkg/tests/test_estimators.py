import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from univhash import types as ty
from univhash.estimators import SyndromeChannelCoder, UniversalChannelCoder, UniversalSourceCoder
from univhash.gfq import mat_vec_mul


def bernoulli_rows(p, n, rows, seed):
    return (np.random.default_rng(seed).random((rows, n)) < p).astype(np.int64)


def test_params_round_trip():
    est = UniversalSourceCoder(rate=0.8, tau=4, random_state=3)
    assert est.get_params()["rate"] == 0.8
    twin = clone(est)
    assert twin.get_params() == est.get_params() and not hasattr(twin, "code_")
    est.set_params(rate=0.5)
    assert est.rate == 0.5


def test_source_coder_round_trip():
    X = bernoulli_rows(0.05, 16, 300, 0)
    est = UniversalSourceCoder(rate=0.75, n_candidates=5, random_state=1).fit(X)
    assert est.n_features_in_ == 16 and est.matrix_.rows == 12
    C = est.transform(X[:40])
    assert C.shape == (40, 12)
    assert np.array_equal(C, mat_vec_mul(est.matrix_, X[:40]))
    X_hat = est.inverse_transform(C)
    recovered = (X_hat == X[:40]).all(axis=1).mean()
    assert recovered == pytest.approx(est.score(X[:40]))
    assert est.score(X) >= 1 - est.train_error_ - 1e-12
    assert est.score(X) > 0.8


def test_source_coder_is_deterministic():
    X = bernoulli_rows(0.1, 12, 50, 2)
    a = UniversalSourceCoder(random_state=7).fit(X).matrix_
    b = UniversalSourceCoder(random_state=7).fit(X).matrix_
    assert a == b


def test_source_coder_validation():
    with pytest.raises(NotFittedError):
        UniversalSourceCoder().transform([[0, 1]])
    est = UniversalSourceCoder(random_state=0).fit(bernoulli_rows(0.1, 8, 10, 0))
    with pytest.raises(ValueError):
        est.transform([[0, 1, 2, 0, 0, 0, 0, 0]])
    with pytest.raises(ValueError):
        est.transform([[0, 1]])


def test_channel_coder_end_to_end():
    W = ty.ConditionalDistribution.bsc(0.02)
    est = UniversalChannelCoder(n=12, rate_a=0.45, rate_b=0.3, n_candidates=3,
                                selection_channel=W, selection_trials=200, random_state=0).fit()
    assert clone(est).get_params()["n"] == 12
    M, Y = est.simulate(ty.ConditionalDistribution([[1, 0], [0, 1]]), 50, random_state=1)
    X = est.transform(M)
    assert np.array_equal(mat_vec_mul(est.code_.A, X), np.broadcast_to(est.code_.c, (50, est.code_.A.rows)))
    assert np.array_equal(mat_vec_mul(est.code_.B, X), M)
    assert np.array_equal(Y, X)
    M, Y = est.simulate(W, 200, random_state=2)
    assert (est.predict(Y) == M).all(axis=1).mean() > 0.5


def test_channel_coder_not_fitted():
    with pytest.raises(NotFittedError):
        UniversalChannelCoder().predict([[0] * 16])


def test_syndrome_coder():
    est = SyndromeChannelCoder(n=12, rate=0.5, random_state=4).fit()
    X = est.sample_codewords(30, random_state=5)
    assert not mat_vec_mul(est.matrix_, X).any()
    assert np.array_equal(est.predict(X), X)
    with pytest.raises(ValueError):
        est.predict([[0] * 5])
