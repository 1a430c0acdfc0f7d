"""Hot numeric kernels: conditional-entropy scoring and PGN simulation.

Each kernel exists twice, a numba version (``*_nb``) and a numpy version
(``*_np``).  The public names dispatch on :data:`sffsba._jit.USE_NUMBA`.
Both paths must agree to floating rounding; ``tests/test_kernels.py`` checks
this and ``benchmarks/bench_kernels.py`` times them against each other.

Predictor patterns are passed around as *compact ids*: the ranks of the
distinct pattern codes in ascending code order.  Extending a pattern set by
one binary feature maps id ``i`` to ``2*i + bit``, which keeps the ascending
order, so counts never need tables of size ``2**d``.
"""
import math

import numpy as np

from ._jit import USE_NUMBA, njit


# --------------------------------------------------------------------------
# conditional entropy


@njit
def _xlog2x(v):
    if v <= 0.0:
        return 0.0
    return v * math.log2(v)


@njit
def _entropy_from_counts_nb(counts, n_obs, n_patterns, alpha):
    # counts has shape (m, 2); rows with zero total are unobserved ids
    s = 0.0
    observed = 0
    for i in range(counts.shape[0]):
        c0 = counts[i, 0]
        c1 = counts[i, 1]
        tot = c0 + c1
        if tot == 0:
            continue
        observed += 1
        s += _xlog2x(float(tot)) - _xlog2x(float(c0)) - _xlog2x(float(c1))
    unobserved = n_patterns - observed
    mass = alpha * unobserved
    value = (s + mass) / (n_obs + mass)
    if value < 0.0:
        value = 0.0
    elif value > 1.0:
        value = 1.0
    return value


@njit
def score_ids_nb(ids, m, n_patterns, y, alpha):
    counts = np.zeros((m, 2), dtype=np.int64)
    for t in range(ids.shape[0]):
        counts[ids[t], y[t]] += 1
    return _entropy_from_counts_nb(counts, ids.shape[0], n_patterns, alpha)


@njit
def extension_scores_nb(ids, m, n_patterns, lagged, candidates, y, alpha):
    n_obs = ids.shape[0]
    out = np.empty(candidates.shape[0], dtype=np.float64)
    counts = np.zeros((2 * m, 2), dtype=np.int64)
    for c in range(candidates.shape[0]):
        row = lagged[candidates[c]]
        counts[:, :] = 0
        for t in range(n_obs):
            counts[2 * ids[t] + row[t], y[t]] += 1
        out[c] = _entropy_from_counts_nb(counts, n_obs, n_patterns, alpha)
    return out


def _entropy_from_counts_np(counts, n_obs, n_patterns, alpha):
    """Vectorized over a leading candidate axis: ``counts`` is (C, m, 2)."""
    c0 = counts[..., 0].astype(np.float64)
    c1 = counts[..., 1].astype(np.float64)
    tot = c0 + c1
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = (np.where(tot > 0, tot * np.log2(np.where(tot > 0, tot, 1.0)), 0.0)
                 - np.where(c0 > 0, c0 * np.log2(np.where(c0 > 0, c0, 1.0)), 0.0)
                 - np.where(c1 > 0, c1 * np.log2(np.where(c1 > 0, c1, 1.0)), 0.0))
    s = terms.sum(axis=-1)
    observed = (tot > 0).sum(axis=-1)
    mass = alpha * (n_patterns - observed)
    return np.clip((s + mass) / (n_obs + mass), 0.0, 1.0)


def score_ids_np(ids, m, n_patterns, y, alpha):
    counts = np.bincount(2 * ids + y, minlength=2 * m).reshape(1, m, 2)
    return float(_entropy_from_counts_np(counts, ids.shape[0], n_patterns, alpha)[0])


def extension_scores_np(ids, m, n_patterns, lagged, candidates, y, alpha):
    n_obs = ids.shape[0]
    n_cand = candidates.shape[0]
    keys = (2 * ids[None, :] + lagged[candidates].astype(np.int64)) * 2 + y[None, :]
    keys += (np.arange(n_cand, dtype=np.int64) * (4 * m))[:, None]
    counts = np.bincount(keys.ravel(), minlength=n_cand * 4 * m).reshape(n_cand, 2 * m, 2)
    return _entropy_from_counts_np(counts, n_obs, n_patterns, alpha)


def score_ids(ids, m, n_patterns, y, alpha):
    """Penalized mean conditional entropy of ``y`` given compact pattern ids.

    ``n_patterns`` is the size of the full pattern space (``2**d``); every
    pattern not observed adds pseudo-mass ``alpha`` at maximal entropy.
    """
    if USE_NUMBA:
        return float(score_ids_nb(ids, m, float(n_patterns), y, float(alpha)))
    return score_ids_np(ids, m, float(n_patterns), y, float(alpha))


def extension_scores(ids, m, n_patterns, lagged, candidates, y, alpha):
    """Score ``ids`` extended by each row ``lagged[c]`` for ``c`` in ``candidates``.

    ``n_patterns`` refers to the extended pattern space (``2**(d+1)``).
    """
    if USE_NUMBA:
        return extension_scores_nb(ids, m, float(n_patterns), lagged, candidates, y, float(alpha))
    return extension_scores_np(ids, m, float(n_patterns), lagged, candidates, y, float(alpha))


def compact_ids(codes):
    """Rank-encode integer pattern codes; returns ``(ids, m)``."""
    uniq, inv = np.unique(codes, return_inverse=True)
    return inv.astype(np.int64).ravel(), int(uniq.shape[0])


_DENSE_BITS = 16


@njit
def subset_ids_nb(lagged, subset):
    n_obs = lagged.shape[1]
    codes = np.zeros(n_obs, dtype=np.int64)
    for j in subset:
        for t in range(n_obs):
            codes[t] = 2 * codes[t] + lagged[j, t]
    seen = np.zeros(1 << subset.shape[0], dtype=np.int64)
    for t in range(n_obs):
        seen[codes[t]] = 1
    m = 0
    for c in range(seen.shape[0]):
        if seen[c]:
            seen[c] = m
            m += 1
    for t in range(n_obs):
        codes[t] = seen[codes[t]]
    return codes, m


def subset_ids_np(lagged, subset):
    codes = np.zeros(lagged.shape[1], dtype=np.int64)
    for j in subset:
        codes = 2 * codes + lagged[j]
    return compact_ids(codes)


def subset_ids(lagged, subset):
    """Compact pattern ids of the rows ``lagged[subset]`` read as bit columns."""
    subset = np.asarray(subset, dtype=np.int64)
    if USE_NUMBA and subset.shape[0] <= _DENSE_BITS:
        ids, m = subset_ids_nb(lagged, subset)
        return ids, int(m)
    return subset_ids_np(lagged, subset)


# --------------------------------------------------------------------------
# PGN simulation


_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@njit
def hashed_bit_nb(key, code):
    z = key + np.uint64(code) * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return np.uint8(z & np.uint64(1))


def hashed_bits_np(keys, codes):
    """Vectorized splitmix64 finalizer; ``keys`` and ``codes`` broadcast."""
    with np.errstate(over="ignore"):
        z = np.asarray(keys, dtype=np.uint64) + np.asarray(codes, dtype=np.uint64) * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
    return (z & np.uint64(1)).astype(np.uint8)


@njit
def simulate_nb(state0, pred_flat, pred_ptr, tables, hashed, keys, choice, coins, source_coin):
    n = state0.shape[0]
    n_times = choice.shape[0] + 1
    out = np.empty((n, n_times), dtype=np.uint8)
    out[:, 0] = state0
    for t in range(1, n_times):
        for i in range(n):
            lo = pred_ptr[i]
            hi = pred_ptr[i + 1]
            if hi == lo and source_coin:
                out[i, t] = coins[t - 1, i]
                continue
            code = 0
            for p in range(lo, hi):
                code = 2 * code + out[pred_flat[p], t - 1]
            f = choice[t - 1, i]
            if hashed[i]:
                out[i, t] = hashed_bit_nb(keys[i, f], code)
            else:
                out[i, t] = tables[i, f, code]
    return out


def simulate_np(state0, pred_flat, pred_ptr, tables, hashed, keys, choice, coins, source_coin):
    n = state0.shape[0]
    n_times = choice.shape[0] + 1
    degree = np.diff(pred_ptr)
    dmax = int(degree.max()) if n else 0
    width = max(dmax, 1)
    # right-aligned padding: leading zero bits leave the code unchanged
    padded = np.zeros((n, width), dtype=np.int64)
    mask = np.zeros((n, width), dtype=bool)
    for i in range(n):
        d = degree[i]
        if d:
            padded[i, width - d:] = pred_flat[pred_ptr[i]:pred_ptr[i + 1]]
            mask[i, width - d:] = True
    weights = (np.int64(1) << np.arange(width - 1, -1, -1, dtype=np.int64))
    is_source = degree == 0
    rows = np.arange(n)
    table_width = tables.shape[2]
    out = np.empty((n, n_times), dtype=np.uint8)
    out[:, 0] = state0
    for t in range(1, n_times):
        prev = out[:, t - 1].astype(np.int64)
        codes = (prev[padded] * mask * weights).sum(axis=1)
        f = choice[t - 1]
        nxt = tables[rows, f, np.where(hashed, 0, codes) % table_width]
        if hashed.any():
            nxt = np.where(hashed, hashed_bits_np(keys[rows, f], codes), nxt)
        if source_coin:
            nxt = np.where(is_source, coins[t - 1], nxt)
        out[:, t] = nxt
    return out


def simulate_kernel(state0, pred_flat, pred_ptr, tables, hashed, keys, choice, coins, source_coin):
    """Run the PGN forward from ``state0``; one column per time point.

    Genes flagged in ``hashed`` evaluate a pseudo-random truth table keyed by
    ``keys[gene, function]`` instead of reading ``tables``.
    """
    args = (state0, pred_flat, pred_ptr, tables, hashed, keys, choice, coins, bool(source_coin))
    if USE_NUMBA:
        return simulate_nb(*args)
    return simulate_np(*args)


# --------------------------------------------------------------------------
# all pairs at once (the breadth-first k = 2 round)


@njit
def pair_scores_nb(lagged, pool, y, alpha):
    p = pool.shape[0]
    n_obs = y.shape[0]
    out = np.full((p, p), np.inf)
    counts = np.zeros((4, 2), dtype=np.int64)
    for a in range(p):
        ra = lagged[pool[a]]
        for b in range(a + 1, p):
            rb = lagged[pool[b]]
            counts[:, :] = 0
            for t in range(n_obs):
                counts[2 * ra[t] + rb[t], y[t]] += 1
            v = _entropy_from_counts_nb(counts, n_obs, 4.0, alpha)
            out[a, b] = v
            out[b, a] = v
    return out


def pair_scores_np(lagged, pool, y, alpha):
    p = pool.shape[0]
    out = np.full((p, p), np.inf)
    for a in range(p - 1):
        ids = lagged[pool[a]].astype(np.int64)
        row = extension_scores_np(ids, 2, 4.0, lagged, pool[a + 1:], y, alpha)
        out[a, a + 1:] = row
        out[a + 1:, a] = row
    return out


def pair_scores(lagged, pool, y, alpha):
    """Symmetric matrix of criterion values for every pair drawn from ``pool``.

    The diagonal is ``inf``; each pair is encoded lower-pool-index first.
    """
    pool = np.asarray(pool, dtype=np.int64)
    if USE_NUMBA:
        return pair_scores_nb(lagged, pool, y, float(alpha))
    return pair_scores_np(lagged, pool, y, float(alpha))
