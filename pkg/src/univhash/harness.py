"""Error-probability evaluation and experiment orchestration.

Monte Carlo trials are processed in chunks of :data:`CHUNK` and chunk ``k``
draws from ``derive_rng(seed, k, stream)``; results therefore depend only on
the seed, never on how chunks are scheduled.  Stream 0 always carries the
source output (or the channel noise), so the source and syndrome simulators
see identical noise under a shared seed.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import stats

from . import bitpack
from . import types as ty
from .coders import (ChannelCode, SourceCode, TIE_TOL,
                     channel_decode, channel_encode, rows_for_rate)
from .ensembles import (AllLinearSpec, EnsembleKind, combine_alpha_beta,
                        derive_rng, ensemble_image_size, estimate_alpha_beta,
                        kappa, make_ensemble)
from .exponents import (BoundInputs, bound_channel_rhs, bound_source_rhs,
                        exponent_channel, exponent_source, is_vacuous)
from .gfq import (AffineSolver, FieldMatrix, MAX_FREE_DIMS, ResourceGuardError,
                  all_vectors, coefficient_grid, lex_key, mat_vec_mul)

CHUNK = 2048
#: ``log2`` of the largest exhaustive evaluation (sequences times messages).
MAX_EXACT_BITS = 24


@dataclass(frozen=True)
class Estimate:
    value: float
    ci: float = 0.0
    trials: int = 0

    @property
    def sigma(self) -> float:
        """Binomial standard error; zero for exact values."""
        if not self.trials:
            return 0.0
        p = self.value
        return math.sqrt(max(p * (1 - p), 0.0) / self.trials)

    def __iter__(self):
        yield self.value
        yield self.ci


def binomial_ci(failures: int, trials: int, method: str = "normal") -> Tuple[float, float]:
    """Point estimate and 95% half-width (normal approximation or Clopper-Pearson)."""
    p = failures / trials
    if method == "normal":
        return p, 1.96 * math.sqrt(p * (1 - p) / trials)
    if method == "exact":
        lo = stats.beta.ppf(0.025, failures, trials - failures + 1) if failures else 0.0
        hi = stats.beta.ppf(0.975, failures + 1, trials - failures) if failures < trials else 1.0
        return p, float(max(p - lo, hi - p))
    raise ValueError(f"unknown interval method {method!r}")


def sample_iid(dist: ty.Distribution, size, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. symbols by inverse CDF (one uniform per symbol)."""
    cdf = np.cumsum(dist.probs)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(size), side="right")


def pass_channel(x: np.ndarray, W: ty.ConditionalDistribution, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(W.rows, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(x.shape)
    return (u[..., None] >= cdf[x]).sum(axis=-1)


def _chunks(trials: int):
    for k, start in enumerate(range(0, trials, CHUNK)):
        yield k, min(CHUNK, trials - start)


# -- source coding -----------------------------------------------------------

def _cluster_ids(scores: np.ndarray) -> np.ndarray:
    """Integer ranks of scores with values within TIE_TOL merged."""
    uniq = np.unique(scores)
    rank = np.concatenate([[0], np.cumsum(np.diff(uniq) > TIE_TOL)])
    return rank[np.searchsorted(uniq, scores)]


def decoded_representatives(A: FieldMatrix, X: np.ndarray, scores: np.ndarray) -> np.ndarray:
    """For rows of ``X`` (in lexicographic order), a mask of those the decoder returns.

    The decoder maps each syndrome to its minimum-score member, ties broken
    lexicographically.
    """
    if A.rows:
        syn = lex_key(mat_vec_mul(A, X), A.q)
    else:
        syn = np.zeros(X.shape[0], dtype=np.int64)
    order = np.lexsort((np.arange(X.shape[0]), _cluster_ids(scores), syn))
    first = np.ones(order.size, dtype=bool)
    first[1:] = syn[order][1:] != syn[order][:-1]
    mask = np.zeros(X.shape[0], dtype=bool)
    mask[order[first]] = True
    return mask


def _seq_probs(X: np.ndarray, mu: ty.Distribution) -> np.ndarray:
    with np.errstate(divide="ignore"):
        logp = np.log2(mu.probs)
    return np.exp2(logp[X].sum(axis=1))


def exact_source_error(code, mu_x: ty.Distribution) -> float:
    """``mu_X({x : decode(encode(x)) != x})`` by enumerating every ``x``.

    ``code`` may also be a bare matrix, including one with zero rows (every
    sequence then shares the single empty syndrome).
    """
    A = code.A if isinstance(code, SourceCode) else code
    X = all_vectors(A.cols, A.q, MAX_EXACT_BITS)
    ok = decoded_representatives(A, X, ty.batch_entropy(X, A.q))
    return float(max(0.0, 1.0 - _seq_probs(X[ok], mu_x).sum()))


def _decode_many_generic(X: np.ndarray, null_members: np.ndarray, q: int) -> np.ndarray:
    """Decode the syndrome of each row of ``X`` via its coset ``x + ker A``."""
    out = np.empty_like(X)
    n = X.shape[1]
    M = null_members.shape[0]
    step = max(1, (1 << 20) // max(M * n, 1))
    for s in range(0, X.shape[0], step):
        C = (X[s:s + step, None, :] + null_members[None]) % q
        flat = C.reshape(-1, n)
        h = ty.batch_entropy(flat, q).reshape(C.shape[0], M)
        key = lex_key(flat, q).reshape(C.shape[0], M)
        lo = h.min(axis=1, keepdims=True)
        big = np.iinfo(np.int64).max
        pick = np.where(h <= lo + TIE_TOL, key, big).argmin(axis=1)
        out[s:s + step] = C[np.arange(C.shape[0]), pick]
    return out


class _SourceDecoderBatch:
    """Decode many sequences' syndromes under one matrix."""

    def __init__(self, A: FieldMatrix):
        self.A = A
        self.q, self.n = A.q, A.cols
        basis = AffineSolver(A).basis
        if basis.shape[0] > MAX_FREE_DIMS:
            raise ResourceGuardError(f"kernel dimension {basis.shape[0]} exceeds the guard")
        self.packed = bitpack.supported(self.q, self.n)
        if self.packed:
            self.span = bitpack.span(basis)
        else:
            self.span = (coefficient_grid(basis.shape[0], self.q) @ basis) % self.q

    def failures(self, truth: np.ndarray, observed: Optional[np.ndarray] = None) -> np.ndarray:
        """Failure mask of decoding ``truth`` from the syndrome of ``observed``.

        ``observed`` defaults to ``truth``; it may differ from ``truth`` by a
        codeword (the additive-channel case), which leaves the syndrome intact.
        """
        observed = truth if observed is None else observed
        if self.packed:
            est = bitpack.source_decode_many(bitpack.pack(observed), self.span, self.n)
            return est != bitpack.pack(truth)
        est = _decode_many_generic(observed, self.span, self.q)
        return (est != truth).any(axis=1)


def mc_source_error(code: SourceCode, mu_x: ty.Distribution, trials: int, seed: int,
                    ci: str = "normal") -> Estimate:
    if trials < 1:
        raise ValueError("need at least one trial")
    dec = _SourceDecoderBatch(code.A)
    fails = 0
    for k, size in _chunks(trials):
        X = sample_iid(mu_x, (size, code.n), derive_rng(seed, k, 0))
        fails += int(dec.failures(X).sum())
    p, h = binomial_ci(fails, trials, ci)
    return Estimate(p, h, trials)


def mc_syndrome_error(A: FieldMatrix, noise: ty.Distribution, trials: int, seed: int,
                      ci: str = "normal", return_indicators: bool = False):
    """Uniform codewords of ``ker A`` through ``y = x + z``; failure iff ``z_hat != z``."""
    dec = _SourceDecoderBatch(A)
    basis = AffineSolver(A).basis
    ind = []
    for k, size in _chunks(trials):
        Z = sample_iid(noise, (size, A.cols), derive_rng(seed, k, 0))
        coeff = derive_rng(seed, k, 1).integers(0, A.q, size=(size, basis.shape[0]))
        Xc = (coeff @ basis) % A.q
        Y = (Xc + Z) % A.q
        ind.append(dec.failures(Z, observed=Y))
    ind = np.concatenate(ind)
    p, h = binomial_ci(int(ind.sum()), trials, ci)
    est = Estimate(p, h, trials)
    return (est, ind) if return_indicators else est


def source_failure_indicators(code: SourceCode, mu_x: ty.Distribution, trials: int,
                              seed: int) -> np.ndarray:
    dec = _SourceDecoderBatch(code.A)
    return np.concatenate([
        dec.failures(sample_iid(mu_x, (size, code.n), derive_rng(seed, k, 0)))
        for k, size in _chunks(trials)])


def exact_syndrome_error(A: FieldMatrix, noise: ty.Distribution) -> float:
    """Exact additive-channel error; equals source-coding error of the noise."""
    return exact_source_error(A, noise)


# -- channel coding ----------------------------------------------------------

class _ChannelSimulator:
    """Vectorized encoder/decoder for one channel code."""

    def __init__(self, code: ChannelCode):
        self.code = code
        self.q, self.n = code.q, code.n
        self.solver = AffineSolver(code.stacked())
        self.packed = bitpack.supported(self.q, self.n) and code.y_size == 2
        if self.packed:
            self.enc_span = bitpack.span(self.solver.basis)
            counts = np.arange(self.n + 1)
            self.div_table = ty.divergence_from_counts(
                np.stack([self.n - counts, counts], axis=1), code.mu_x, self.n)
            members = bitpack.span(code.decoding_coset().basis) ^ bitpack.pack(
                code.decoding_coset().particular)[0]
            self.decoder = bitpack.ConditionalDecoder(members, self.n)
            self.b_rows = bitpack.pack(code.B.data) if code.B.rows else np.zeros(0, np.uint64)

    def encode(self, M: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Codewords (rows) and a mask of messages whose constraint set was empty."""
        rhs = np.hstack([np.broadcast_to(self.code.c, (M.shape[0], self.code.c.size)), M])
        part, ok = self.solver.solve(rhs)
        if not self.packed:
            X = np.zeros_like(part)
            for i in np.flatnonzero(ok):
                X[i] = channel_encode(self.code, M[i]).value
            return X, ~ok
        C = bitpack.pack(part)[:, None] ^ self.enc_span[None, :]
        scores = self.div_table[np.bitwise_count(C)]
        lo = scores.min(axis=1, keepdims=True)
        best = np.where(scores <= lo + TIE_TOL, C, np.uint64(0xFFFFFFFFFFFFFFFF)).min(axis=1)
        return bitpack.unpack(best, self.n), ~ok

    def decode(self, Y: np.ndarray) -> np.ndarray:
        if not self.packed:
            return np.array([channel_decode(self.code, y) for y in Y]).reshape(len(Y), -1)
        yp = bitpack.pack(Y)
        xh = np.array([self.decoder(v) for v in yp], dtype=np.uint64)
        return bitpack.parity_product(self.b_rows, xh)


def mc_channel_error(code: ChannelCode, mu_yx: ty.ConditionalDistribution, trials: int,
                     seed: int, ci: str = "normal", check_codewords: bool = False):
    """Uniform messages from ``Im B`` through the channel; failure iff ``B x_hat != m``.

    With ``check_codewords`` the number of emitted codewords violating
    ``A x = c`` or ``B x = m`` is returned as well.
    """
    sim = _ChannelSimulator(code)
    fails = violations = 0
    for k, size in _chunks(trials):
        U = derive_rng(seed, k, 1).integers(0, code.q, size=(size, code.n))
        M = mat_vec_mul(code.B, U) if code.B.rows else np.zeros((size, 0), np.int64)
        X, enc_fail = sim.encode(M)
        Y = pass_channel(X, mu_yx, derive_rng(seed, k, 0))
        M_hat = sim.decode(Y)
        wrong = (M_hat != M).any(axis=1) | enc_fail
        fails += int(wrong.sum())
        if check_codewords:
            good = ~enc_fail
            bad = np.zeros(int(good.sum()), dtype=bool)
            if code.A.rows:
                bad |= (mat_vec_mul(code.A, X[good]) != code.c).any(axis=1)
            if code.B.rows:
                bad |= (mat_vec_mul(code.B, X[good]) != M[good]).any(axis=1)
            violations += int(bad.sum())
    p, h = binomial_ci(fails, trials, ci)
    est = Estimate(p, h, trials)
    return (est, violations) if check_codewords else est


def exact_channel_error(code: ChannelCode, mu_yx: ty.ConditionalDistribution) -> float:
    """Sum over messages in ``Im B`` (uniform) and every output ``y``."""
    msgs = code.messages()
    bits = math.log2(len(msgs)) + code.n * math.log2(code.y_size)
    if bits > MAX_EXACT_BITS + 1e-9:
        raise ResourceGuardError(f"exact channel error needs 2^{bits:.1f} evaluations")
    sim = _ChannelSimulator(code)
    Y = all_vectors(code.n, code.y_size, MAX_EXACT_BITS)
    M_hat = sim.decode(Y)
    X, enc_fail = sim.encode(msgs)
    with np.errstate(divide="ignore"):
        logW = np.log2(mu_yx.rows)
    err = 0.0
    for m, x, failed in zip(msgs, X, enc_fail):
        if failed:
            err += 1.0
            continue
        py = np.exp2(logW[x[None, :], Y].sum(axis=1))
        err += float(py[(M_hat != m).any(axis=1)].sum())
    return min(1.0, err / len(msgs))


# -- experiments ---------------------------------------------------------------

@dataclass
class ExperimentConfig:
    kind: str
    n_values: Tuple[int, ...]
    rates: Tuple[float, ...]
    source: ty.Distribution
    channel: Optional[ty.ConditionalDistribution] = None
    rate_b: Optional[float] = None
    ensemble: str = "sparse"
    ensemble_b: Optional[str] = None
    tau: int = 3
    q: int = 2
    trials: int = 10_000
    matrices: int = 1
    seed: int = 0
    mode: str = "montecarlo"
    ci: str = "normal"
    random_c: bool = True
    xi: float = 1.0
    alpha: Optional[float] = None
    beta: Optional[float] = None
    hash_pairs: int = 64
    hash_trials: int = 500
    reestimate: bool = True
    label: str = ""
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("source", "channel", "syndrome"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.mode not in ("exact", "montecarlo"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.matrices < 1 or self.trials < 1:
            raise ValueError("matrices and trials must be positive")
        if self.kind == "channel":
            if self.channel is None or self.rate_b is None:
                raise ValueError("channel experiments need a channel and rate_b")
        if self.kind == "syndrome" and self.source.size != self.q:
            raise ValueError("additive noise must live on GF(q)")
        self.warnings = self.rate_warnings()

    def rate_warnings(self) -> List[str]:
        out = []
        h = ty.entropy(self.source)
        for r in self.rates:
            if self.kind == "source" and not h < r:
                out.append(f"H(X) = {h:.4f} is not below R = {r}")
            if self.kind == "syndrome" and not h < r:
                out.append(f"H(Z) = {h:.4f} is not below R = {r}")
            if self.kind == "channel":
                joint = self.source.probs[:, None] * self.channel.rows
                h_xy = ty.entropy(joint.ravel()) - ty.entropy(joint.sum(axis=0))
                if not h_xy < r:
                    out.append(f"H(X|Y) = {h_xy:.4f} is not below R_A = {r}")
                if not h > r + self.rate_b:
                    out.append(f"H(X) = {h:.4f} is not above R_A + R_B = {r + self.rate_b}")
        return out

    def ensemble_spec(self, n: int, l: int, which: str = "a") -> EnsembleKind:
        kind = self.ensemble if which == "a" else (self.ensemble_b or self.ensemble)
        return make_ensemble(kind, n, l, self.q, self.tau, self.seed)


@dataclass
class SummaryRow:
    kind: str
    n: int
    rate: float
    rate_b: Optional[float]
    error_estimate: float
    ci_halfwidth: float
    best_error: float
    best_ci_halfwidth: float
    bound_rhs: float
    vacuous: bool
    bound_params: str
    matrices_sampled: int
    seed: int
    wall_time: float

    @classmethod
    def fields(cls) -> List[str]:
        return list(cls.__dataclass_fields__)


@dataclass
class CellResult:
    """Everything evaluated for one ``(n, rate)`` cell."""

    n: int
    rate: float
    errors: List[Estimate]
    codes: list
    best_index: int
    best: Estimate

    @property
    def mean(self) -> float:
        return float(np.mean([e.value for e in self.errors]))

    @property
    def mean_sigma(self) -> float:
        """Standard error of the ensemble mean (matrix spread plus trial noise)."""
        vals = np.array([e.value for e in self.errors])
        between = vals.std(ddof=1) / math.sqrt(len(vals)) if len(vals) > 1 else 0.0
        within = math.sqrt(sum(e.sigma ** 2 for e in self.errors)) / len(vals)
        return float(math.hypot(between, within))


def sample_code(config: ExperimentConfig, n: int, rate: float, index: int, rate_index: int = 0):
    """Member ``index`` of the ensemble for one cell; depends only on the seed."""
    rng = derive_rng(config.seed, n, rate_index, index)
    la = rows_for_rate(n, rate, config.q)
    if config.kind in ("source", "syndrome"):
        A = config.ensemble_spec(n, max(la, 1)).sample(rng)
        return SourceCode(A) if config.kind == "source" else A
    lb = rows_for_rate(n, config.rate_b, config.q)
    A = config.ensemble_spec(n, max(la, 1)).sample(rng)
    B = config.ensemble_spec(n, max(lb, 1), "b").sample(rng)
    if config.random_c:
        c = mat_vec_mul(A, rng.integers(0, config.q, size=n))
    else:
        c = np.zeros(A.rows, dtype=np.int64)
    return ChannelCode(A, B, c, config.source, y_size=config.channel.out_size)


def evaluate_code(config: ExperimentConfig, code, trials: int, seed: int) -> Estimate:
    if config.kind == "source":
        if config.mode == "exact":
            return Estimate(exact_source_error(code, config.source))
        return mc_source_error(code, config.source, trials, seed, config.ci)
    if config.kind == "syndrome":
        if config.mode == "exact":
            return Estimate(exact_syndrome_error(code, config.source))
        return mc_syndrome_error(code, config.source, trials, seed, config.ci)
    if config.mode == "exact":
        return Estimate(exact_channel_error(code, config.channel))
    return mc_channel_error(code, config.channel, trials, seed, config.ci)


def evaluate_cell(config: ExperimentConfig, n: int, rate: float, rate_index: int = 0) -> CellResult:
    """Per-matrix errors, their mean, and the best member.

    The best member is chosen on the screening estimates; with ``reestimate``
    its reported error comes from a fresh, independent run of ``trials``.
    """
    codes, errors = [], []
    for k in range(config.matrices):
        code = sample_code(config, n, rate, k, rate_index)
        seed = int(derive_rng(config.seed, n, rate_index, k, 7).integers(2**62))
        codes.append(code)
        errors.append(evaluate_code(config, code, config.trials, seed))
    best_index = int(np.argmin([e.value for e in errors]))
    best = errors[best_index]
    if config.reestimate and config.mode == "montecarlo":
        seed = int(derive_rng(config.seed, n, rate_index, 2**31).integers(2**62))
        best = evaluate_code(config, codes[best_index], config.trials, seed)
    return CellResult(n, rate, errors, codes, best_index, best)


def ensemble_average_error(config: ExperimentConfig, n: int, rate: float):
    cell = evaluate_cell(config, n, rate)
    return cell.mean, [e.value for e in cell.errors]


def best_member(config: ExperimentConfig, n: int, rate: float):
    cell = evaluate_cell(config, n, rate)
    return cell.codes[cell.best_index], cell.best


def cell_bound(config: ExperimentConfig, n: int, rate: float) -> Tuple[float, str]:
    """Right-hand side of the matching error bound and a label of its parameters."""
    q = config.q
    la = max(rows_for_rate(n, rate, q), 1)
    realized = la * math.log2(q) / n
    spec_a = config.ensemble_spec(n, la)

    def params(spec):
        if isinstance(spec, AllLinearSpec):
            return 1.0, 0.0, "exact"
        if config.alpha is not None and config.beta is not None:
            return config.alpha, config.beta, "supplied"
        est = estimate_alpha_beta(spec, config.hash_pairs, config.hash_trials, config.seed)
        return est.alpha_hat, est.beta_hat, "estimate"

    alpha_a, beta_a, how = params(spec_a)
    if config.kind in ("source", "syndrome"):
        F = exponent_source(config.source, min(realized, math.log2(q)), n).value
        im = ensemble_image_size(spec_a)
        rhs = bound_source_rhs(BoundInputs(n, la, alpha_a, beta_a, im), F, q)
        return rhs, f"alpha={alpha_a:.4g};beta={beta_a:.4g};F={F:.4g};{how}"
    lb = max(rows_for_rate(n, config.rate_b, q), 1)
    spec_b = config.ensemble_spec(n, lb, "b")
    alpha_b, beta_b, how_b = params(spec_b)
    alpha_ab, beta_ab = combine_alpha_beta((alpha_a, beta_a), (alpha_b, beta_b))
    k = kappa(beta_a, config.xi, n, beta_is_small_o=beta_a == 0)
    F = exponent_channel(config.channel, config.source, realized, n).value
    b = BoundInputs(n, la, alpha_a, beta_a, 1, k, alpha_ab, beta_ab)
    rhs = bound_channel_rhs(b, F, q, config.channel.out_size)
    return rhs, f"alpha_A={alpha_a:.4g};beta_A={beta_a:.4g};kappa={k:.4g};F={F:.4g};{how}/{how_b}"


def run_experiment(config: ExperimentConfig, timing: bool = True) -> List[SummaryRow]:
    rows = []
    for n in config.n_values:
        for ri, rate in enumerate(config.rates):
            t0 = time.perf_counter()
            cell = evaluate_cell(config, n, rate, ri)
            rhs, label = cell_bound(config, n, rate)
            mean_ci = 1.96 * cell.mean_sigma
            rows.append(SummaryRow(
                config.kind, n, rate, config.rate_b, cell.mean, mean_ci,
                cell.best.value, cell.best.ci, rhs, is_vacuous(rhs), label,
                config.matrices, config.seed,
                round(time.perf_counter() - t0, 3) if timing else 0.0))
    return rows


def write_csv(rows: List[SummaryRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SummaryRow.fields())
    for r in rows:
        vals = []
        for name in SummaryRow.fields():
            v = getattr(r, name)
            if isinstance(v, (float, np.floating)):
                v = repr(round(float(v), 12))
            elif isinstance(v, (bool, np.bool_)):
                v = int(v)
            elif v is None:
                v = ""
            vals.append(v)
        w.writerow(vals)
