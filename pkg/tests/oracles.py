"""Independent reference implementations used to freeze expected values.

Nothing here imports the package: everything is plain Python over tuples so a
bug in the vectorized code cannot leak into the expectation.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction


def seq_entropy(x, k):
    n = len(x)
    c = Counter(x)
    return -sum(v / n * math.log2(v / n) for v in c.values() if v)


def seq_cond_entropy(x, y):
    """H(x|y) from the joint empirical distribution."""
    n = len(x)
    joint = Counter(zip(x, y))
    marg = Counter(y)
    return -sum(v / n * math.log2(v / marg[b]) for (a, b), v in joint.items())


def dist_entropy(p):
    return -sum(v * math.log2(v) for v in p if v > 0)


def kl(p, r):
    out = 0.0
    for a, b in zip(p, r):
        if a > 0:
            if b == 0:
                return math.inf
            out += a * math.log2(a / b)
    return out


def seq_divergence(x, mu):
    n = len(x)
    c = Counter(x)
    return kl([c.get(a, 0) / n for a in range(len(mu))], mu)


def matvec(A, u, q):
    return tuple(sum(a * b for a, b in zip(row, u)) % q for row in A)


def space(n, q):
    """All vectors of length n in lexicographic order."""
    return list(itertools.product(range(q), repeat=n))


def coset(A, c, q, n):
    c = tuple(c)
    return [u for u in space(n, q) if matvec(A, u, q) == c]


def argmin_lex(cands, score, tol=1e-9):
    """First candidate (in the given lex order) within ``tol`` of the minimum."""
    if not cands:
        return None
    s = [score(u) for u in cands]
    lo = min(s)
    return next(u for u, v in zip(cands, s) if v <= lo + tol)


def source_decode(A, c, q, n):
    return argmin_lex(coset(A, c, q, n), lambda u: seq_entropy(u, q))


def channel_encode(A, B, c, m, mu, q, n):
    target = tuple(c) + tuple(m)
    cands = [u for u in space(n, q) if matvec(A, u, q) + matvec(B, u, q) == target]
    return argmin_lex(cands, lambda u: seq_divergence(u, mu))


def channel_decode_x(A, c, y, q, n):
    return argmin_lex(coset(A, c, q, n), lambda u: seq_cond_entropy(u, y))


def parity_toy_error(p):
    """Error of the single parity check on three Bernoulli(p) bits."""
    return 1 - p ** 3 - (1 - p) ** 3


def rank_mod(A, q):
    M = [list(r) for r in A]
    r = 0
    cols = len(M[0]) if M else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(M)) if M[i][c] % q), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], q - 2, q)
        M[r] = [v * inv % q for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] % q:
                f = M[i][c]
                M[i] = [(a - f * b) % q for a, b in zip(M[i], M[r])]
        r += 1
    return r


def types_by_sequences(n, k):
    """Every type of length n, found by scanning all sequences."""
    seen = set()
    for x in itertools.product(range(k), repeat=n):
        c = Counter(x)
        seen.add(tuple(c.get(a, 0) for a in range(k)))
    return sorted(seen)


def source_exponent(mu, rate, n):
    best = math.inf
    for counts in types_by_sequences(n, len(mu)):
        p = [v / n for v in counts]
        val = kl(p, mu) + max(rate - dist_entropy(p), 0.0)
        best = min(best, val)
    return best


def channel_exponent(W, mu, rate, n):
    """Brute force over all conditional types given the closest marginal type."""
    kx, ky = len(W), len(W[0])
    marg = min(types_by_sequences(n, kx), key=lambda c: (kl([v / n for v in c], mu), c))
    best = math.inf
    per_row = [[c for c in itertools.product(range(m + 1), repeat=ky) if sum(c) == m] for m in marg]
    for rows in itertools.product(*per_row):
        d = 0.0
        for x, row in enumerate(rows):
            if marg[x]:
                d += marg[x] / n * kl([v / marg[x] for v in row], W[x])
        col = [sum(rows[x][y] for x in range(kx)) for y in range(ky)]
        h = 0.0
        for x in range(kx):
            for y in range(ky):
                v = rows[x][y]
                if v:
                    h -= v / n * math.log2(v / col[y])
        best = min(best, d + max(rate - h, 0.0))
    return best


def all_linear_collision(n, l, u, v):
    """Exact P(Au = Av) over all binary l x n matrices, as a fraction."""
    hits = total = 0
    for bits in itertools.product((0, 1), repeat=l * n):
        A = [bits[i * n:(i + 1) * n] for i in range(l)]
        total += 1
        hits += matvec(A, u, 2) == matvec(A, v, 2)
    return Fraction(hits, total)


def exact_channel_error(A, B, c, mu, W, q, n):
    """Message error with uniform messages over Im B, enumerating every output."""
    msgs = sorted({matvec(B, u, q) for u in space(n, q)})
    ky = len(W[0])
    err = 0.0
    for m in msgs:
        x = channel_encode(A, B, c, m, mu, q, n)
        if x is None:
            err += 1.0
            continue
        for y in itertools.product(range(ky), repeat=n):
            py = math.prod(W[a][b] for a, b in zip(x, y))
            if py and matvec(B, channel_decode_x(A, c, y, q, n), q) != m:
                err += py
    return err / len(msgs)


def cosets(A, q, n):
    """Every syndrome's coset, members kept in lexicographic order."""
    out = {}
    for u in space(n, q):
        out.setdefault(matvec(A, u, q), []).append(u)
    return out
