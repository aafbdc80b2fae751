"""Pure-Python/numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
"""

import math

import numpy as np


def cross_split_counts(scores, offsets):
    """Win/tie counts over every (split of i) x (split of j) combination.

    Args:
        scores: concatenated per-player scores, each segment sorted ascending.
        offsets: segment boundaries, length n_players + 1.

    Returns:
        ``(wins_i, wins_j, ties)`` int64 arrays over pairs i < j in row-major order.
    """
    scores = np.asarray(scores, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.int64)
    n = len(offsets) - 1
    n_pairs = n * (n - 1) // 2
    wins_i = np.zeros(n_pairs, dtype=np.int64)
    wins_j = np.zeros(n_pairs, dtype=np.int64)
    ties = np.zeros(n_pairs, dtype=np.int64)
    segs = [scores[offsets[k]:offsets[k + 1]] for k in range(n)]
    p = 0
    for i in range(n):
        a = segs[i]
        for j in range(i + 1, n):
            b = segs[j]
            wi = int(np.searchsorted(b, a, side="left").sum())
            wj = int(np.searchsorted(a, b, side="left").sum())
            wins_i[p] = wi
            wins_j[p] = wj
            ties[p] = len(a) * len(b) - wi - wj
            p += 1
    return wins_i, wins_j, ties


def same_split_counts(matrix):
    """Win/tie counts over splits observed for both players.

    Args:
        matrix: ``(n_players, n_splits)`` float64 scores, NaN where missing.

    Returns:
        ``(wins_i, wins_j, ties, shared)`` int64 arrays over pairs i < j.
    """
    m = np.asarray(matrix, dtype=np.float64)
    n = m.shape[0]
    present = ~np.isnan(m)
    out = [[], [], [], []]
    for i in range(n - 1):
        a, b = m[i], m[i + 1:]
        both = present[i] & present[i + 1:]
        out[0].append(((a > b) & both).sum(axis=1))
        out[1].append(((a < b) & both).sum(axis=1))
        out[2].append(((a == b) & both).sum(axis=1))
        out[3].append(both.sum(axis=1))
    if n < 2:
        return tuple(np.zeros(0, dtype=np.int64) for _ in range(4))
    return tuple(np.concatenate(o).astype(np.int64) for o in out)


def _log_sigmoid(x):
    # log(1 / (1 + exp(-x))) without overflow
    return -np.logaddexp(0.0, -x)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def bt_derivatives(beta, ii, jj, succ, fail):
    """Unpenalized log-likelihood, gradient and Hessian of the pairwise logit model.

    Row r says player ``ii[r]`` beat ``jj[r]`` ``succ[r]`` times and lost ``fail[r]`` times.
    """
    beta = np.asarray(beta, dtype=np.float64)
    ii = np.asarray(ii, dtype=np.int64)
    jj = np.asarray(jj, dtype=np.int64)
    succ = np.asarray(succ, dtype=np.float64)
    fail = np.asarray(fail, dtype=np.float64)
    n = beta.shape[0]
    d = beta[ii] - beta[jj]
    ls_pos = _log_sigmoid(d)
    ls_neg = _log_sigmoid(-d)
    terms = np.where(succ > 0, succ * ls_pos, 0.0) + np.where(fail > 0, fail * ls_neg, 0.0)
    loglik = float(terms.sum())

    p = _sigmoid(d)
    tot = succ + fail
    r = succ - tot * p
    grad = np.zeros(n)
    np.add.at(grad, ii, r)
    np.add.at(grad, jj, -r)

    w = tot * p * (1.0 - p)
    hess = np.zeros((n, n))
    np.add.at(hess, (ii, ii), -w)
    np.add.at(hess, (jj, jj), -w)
    np.add.at(hess, (ii, jj), w)
    np.add.at(hess, (jj, ii), w)
    return loglik, grad, hess


def expected_score(r1, r2, scale, base):
    try:
        return 1.0 / (1.0 + base ** ((r2 - r1) / scale))
    except OverflowError:
        return 0.0


def elo_sequential(ratings, played, ii, jj, actual, k, scale, base):
    """Apply Elo updates in order, in place on ``ratings`` and ``played``.

    ``actual[m]`` is the actual score of player ``ii[m]`` (1, 0 or 0.5).
    """
    r = ratings.tolist()
    cnt = played.tolist()
    for a, b, s in zip(ii.tolist(), jj.tolist(), actual.tolist()):
        e = expected_score(r[a], r[b], scale, base)
        delta = k * (s - e)
        r[a] += delta
        r[b] -= delta
        cnt[a] += 1
        cnt[b] += 1
    ratings[:] = r
    played[:] = cnt
    return ratings
