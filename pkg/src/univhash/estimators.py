"""scikit-learn style wrappers around the universal coders.

``fit`` draws a code from the configured ensemble (optionally keeping the
best of several candidates on the training data); ``transform`` encodes and
``inverse_transform`` / ``predict`` decode.  Hyperparameters follow the usual
``get_params`` / ``set_params`` contract, so the coders drop into pipelines
and parameter searches.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_random_state

from . import types as ty
from .coders import (ChannelCode, SourceCode, channel_encode, rows_for_rate,
                     source_decode, source_encode, syndrome_channel_decode,
                     syndrome_channel_encode)
from .ensembles import make_ensemble
from .gfq import mat_vec_mul
from .harness import _ChannelSimulator, _SourceDecoderBatch, pass_channel


def _check_symbols(X, q: int, n_features=None):
    X = check_array(X, dtype=np.int64, ensure_min_features=1)
    if X.min() < 0 or X.max() >= q:
        raise ValueError(f"symbols must lie in [0, {q})")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"X has {X.shape[1]} features, expected {n_features}")
    return X


class UniversalSourceCoder(TransformerMixin, BaseEstimator):
    """Fixed-rate lossless source coder: syndrome encoder, minimum-entropy decoder.

    Parameters
    ----------
    rate : float
        Target rate in bits per symbol; the matrix gets ``ceil(n R / log2 q)`` rows.
    ensemble : {"sparse", "all_linear"}
    tau : int
        Nonzero additions per column for the sparse ensemble.
    q : int
        Prime alphabet size.
    n_candidates : int
        Matrices drawn during ``fit``.  With more than one, the matrix with the
        fewest decoding failures on the training sequences is kept.
    random_state : int, Generator or None
    """

    def __init__(self, rate=0.75, ensemble="sparse", tau=3, q=2, n_candidates=1,
                 random_state=None):
        self.rate = rate
        self.ensemble = ensemble
        self.tau = tau
        self.q = q
        self.n_candidates = n_candidates
        self.random_state = random_state

    def fit(self, X, y=None):
        X = _check_symbols(X, self.q)
        n = X.shape[1]
        rng = check_random_state(self.random_state)
        l = max(rows_for_rate(n, self.rate, self.q), 1)
        spec = make_ensemble(self.ensemble, n, l, self.q, self.tau)
        best = None
        for _ in range(max(1, self.n_candidates)):
            A = spec.sample(np.random.default_rng(rng.randint(2**31)))
            if self.n_candidates > 1:
                fails = int(_SourceDecoderBatch(A).failures(X).sum())
            else:
                fails = 0
            if best is None or fails < best[0]:
                best = (fails, A)
        self.code_ = SourceCode(best[1])
        self.matrix_ = best[1]
        self.n_features_in_ = n
        self.rate_ = self.code_.rate
        self.train_error_ = best[0] / X.shape[0] if self.n_candidates > 1 else None
        return self

    def transform(self, X):
        """Syndromes ``A x``, one row per sequence."""
        check_is_fitted(self, "code_")
        X = _check_symbols(X, self.q, self.n_features_in_)
        return source_encode(self.code_, X)

    def inverse_transform(self, C):
        """Minimum-entropy member of each syndrome's coset."""
        check_is_fitted(self, "code_")
        C = check_array(C, dtype=np.int64)
        return np.array([source_decode(self.code_, c).value for c in C])

    def score(self, X, y=None):
        """Fraction of sequences recovered exactly."""
        check_is_fitted(self, "code_")
        X = _check_symbols(X, self.q, self.n_features_in_)
        return 1.0 - float(_SourceDecoderBatch(self.matrix_).failures(X).mean())


class UniversalChannelCoder(BaseEstimator):
    """Channel coder with a minimum-divergence encoder and minimum-entropy decoder.

    ``fit`` needs no data: it draws ``(A, B, c)`` for block length ``n``.  When a
    ``selection_channel`` and ``n_candidates > 1`` are given, the triple with the
    lowest simulated message error over that channel is kept.
    """

    def __init__(self, n=16, rate_a=0.45, rate_b=0.4, input_dist=None,
                 ensemble="all_linear", tau=3, q=2, n_candidates=1,
                 selection_channel=None, selection_trials=500, random_state=None):
        self.n = n
        self.rate_a = rate_a
        self.rate_b = rate_b
        self.input_dist = input_dist
        self.ensemble = ensemble
        self.tau = tau
        self.q = q
        self.n_candidates = n_candidates
        self.selection_channel = selection_channel
        self.selection_trials = selection_trials
        self.random_state = random_state

    def _sample(self, rng, mu):
        la = max(rows_for_rate(self.n, self.rate_a, self.q), 1)
        lb = max(rows_for_rate(self.n, self.rate_b, self.q), 1)
        g = np.random.default_rng(rng.randint(2**31))
        A = make_ensemble(self.ensemble, self.n, la, self.q, self.tau).sample(g)
        B = make_ensemble(self.ensemble, self.n, lb, self.q, self.tau).sample(g)
        c = mat_vec_mul(A, g.integers(0, self.q, size=self.n))
        return ChannelCode(A, B, c, mu)

    def fit(self, X=None, y=None):
        from .harness import mc_channel_error

        rng = check_random_state(self.random_state)
        mu = self.input_dist or ty.Distribution.uniform(self.q)
        if not isinstance(mu, ty.Distribution):
            mu = ty.Distribution(mu)
        best = None
        for k in range(max(1, self.n_candidates)):
            code = self._sample(rng, mu)
            if self.n_candidates > 1 and self.selection_channel is not None:
                err = mc_channel_error(code, self.selection_channel,
                                       self.selection_trials, seed=k).value
            else:
                err = 0.0
            if best is None or err < best[0]:
                best = (err, code)
        self.code_ = best[1]
        self.selection_error_ = best[0]
        self.rate_a_ = self.code_.rate_a
        self.rate_b_ = self.code_.rate_b
        self._sim = _ChannelSimulator(self.code_)
        return self

    def transform(self, M):
        """Codewords for messages ``M`` (rows in ``Im B``)."""
        check_is_fitted(self, "code_")
        M = check_array(M, dtype=np.int64, ensure_min_features=0)
        return np.array([channel_encode(self.code_, m).value for m in M])

    def predict(self, Y):
        """Message estimates ``B x_hat`` for channel outputs ``Y``."""
        check_is_fitted(self, "code_")
        Y = check_array(Y, dtype=np.int64)
        return self._sim.decode(Y)

    def simulate(self, channel: ty.ConditionalDistribution, n_messages: int, random_state=None):
        """Draw messages, encode, pass through ``channel``; return ``(M, Y)``."""
        check_is_fitted(self, "code_")
        rng = np.random.default_rng(random_state)
        U = rng.integers(0, self.q, size=(n_messages, self.n))
        M = mat_vec_mul(self.code_.B, U)
        return M, pass_channel(self.transform(M), channel, rng)


class SyndromeChannelCoder(BaseEstimator):
    """Additive-noise channel code: codewords are the kernel of ``A``."""

    def __init__(self, n=16, rate=0.5, ensemble="sparse", tau=3, q=2, random_state=None):
        self.n = n
        self.rate = rate
        self.ensemble = ensemble
        self.tau = tau
        self.q = q
        self.random_state = random_state

    def fit(self, X=None, y=None):
        rng = check_random_state(self.random_state)
        l = max(rows_for_rate(self.n, self.rate, self.q), 1)
        spec = make_ensemble(self.ensemble, self.n, l, self.q, self.tau)
        self.matrix_ = spec.sample(np.random.default_rng(rng.randint(2**31)))
        return self

    def sample_codewords(self, n_codewords: int, random_state=None):
        check_is_fitted(self, "matrix_")
        rng = np.random.default_rng(random_state)
        return np.array([syndrome_channel_encode(self.matrix_, rng) for _ in range(n_codewords)])

    def predict(self, Y):
        """Codeword estimates ``y - z_hat``."""
        check_is_fitted(self, "matrix_")
        Y = _check_symbols(Y, self.q, self.n)
        return np.array([syndrome_channel_decode(self.matrix_, y)[1] for y in Y])
