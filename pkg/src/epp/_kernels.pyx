# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_kernels_py`` for the contracts."""

import numpy as np

from libc.math cimport exp, log1p, pow, isnan, HUGE_VAL


def cross_split_counts(scores, offsets):
    cdef const double[::1] s = np.ascontiguousarray(scores, dtype=np.float64)
    cdef const long long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t n = off.shape[0] - 1
    cdef Py_ssize_t n_pairs = n * (n - 1) // 2
    wi_arr = np.zeros(n_pairs, dtype=np.int64)
    wj_arr = np.zeros(n_pairs, dtype=np.int64)
    t_arr = np.zeros(n_pairs, dtype=np.int64)
    cdef long long[::1] wi = wi_arr
    cdef long long[::1] wj = wj_arr
    cdef long long[::1] tt = t_arr
    cdef Py_ssize_t i, j, p = 0, x, q, a0, a1, b0, b1
    cdef long long acc_i, acc_j
    with nogil:
        for i in range(n):
            a0 = off[i]
            a1 = off[i + 1]
            for j in range(i + 1, n):
                b0 = off[j]
                b1 = off[j + 1]
                # count of b strictly below each a, summed
                acc_i = 0
                q = b0
                for x in range(a0, a1):
                    while q < b1 and s[q] < s[x]:
                        q += 1
                    acc_i += q - b0
                acc_j = 0
                q = a0
                for x in range(b0, b1):
                    while q < a1 and s[q] < s[x]:
                        q += 1
                    acc_j += q - a0
                wi[p] = acc_i
                wj[p] = acc_j
                tt[p] = (a1 - a0) * (b1 - b0) - acc_i - acc_j
                p += 1
    return wi_arr, wj_arr, t_arr


def same_split_counts(matrix):
    cdef const double[:, ::1] m = np.ascontiguousarray(matrix, dtype=np.float64)
    cdef Py_ssize_t n = m.shape[0], n_splits = m.shape[1]
    cdef Py_ssize_t n_pairs = n * (n - 1) // 2 if n > 1 else 0
    arrs = [np.zeros(n_pairs, dtype=np.int64) for _ in range(4)]
    cdef long long[::1] wi = arrs[0]
    cdef long long[::1] wj = arrs[1]
    cdef long long[::1] tt = arrs[2]
    cdef long long[::1] sh = arrs[3]
    cdef Py_ssize_t i, j, s, p = 0
    cdef double a, b
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                for s in range(n_splits):
                    a = m[i, s]
                    b = m[j, s]
                    if isnan(a) or isnan(b):
                        continue
                    sh[p] += 1
                    if a > b:
                        wi[p] += 1
                    elif a < b:
                        wj[p] += 1
                    else:
                        tt[p] += 1
                p += 1
    return tuple(arrs)


cdef inline double _log_sigmoid(double x) nogil:
    if x >= 0:
        return -log1p(exp(-x))
    return x - log1p(exp(x))


cdef inline double _sigmoid(double x) nogil:
    cdef double e
    if x >= 0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


def bt_derivatives(beta, ii, jj, succ, fail):
    cdef const double[::1] b = np.ascontiguousarray(beta, dtype=np.float64)
    cdef const long long[::1] ri = np.ascontiguousarray(ii, dtype=np.int64)
    cdef const long long[::1] rj = np.ascontiguousarray(jj, dtype=np.int64)
    cdef const double[::1] sc = np.ascontiguousarray(succ, dtype=np.float64)
    cdef const double[::1] fl = np.ascontiguousarray(fail, dtype=np.float64)
    cdef Py_ssize_t n = b.shape[0], rows = ri.shape[0], r
    grad_arr = np.zeros(n)
    hess_arr = np.zeros((n, n))
    cdef double[::1] g = grad_arr
    cdef double[:, ::1] h = hess_arr
    cdef double ll = 0.0, d, p, tot, w, res
    cdef long long i, j
    with nogil:
        for r in range(rows):
            i = ri[r]
            j = rj[r]
            d = b[i] - b[j]
            if sc[r] > 0:
                ll += sc[r] * _log_sigmoid(d)
            if fl[r] > 0:
                ll += fl[r] * _log_sigmoid(-d)
            p = _sigmoid(d)
            tot = sc[r] + fl[r]
            res = sc[r] - tot * p
            g[i] += res
            g[j] -= res
            w = tot * p * (1.0 - p)
            h[i, i] -= w
            h[j, j] -= w
            h[i, j] += w
            h[j, i] += w
    return ll, grad_arr, hess_arr


def expected_score(double r1, double r2, double scale, double base):
    return 1.0 / (1.0 + pow(base, (r2 - r1) / scale))


def elo_sequential(ratings, played, ii, jj, actual, double k, double scale, double base):
    cdef double[::1] r = ratings
    cdef long long[::1] cnt = played
    cdef const long long[::1] ai = np.ascontiguousarray(ii, dtype=np.int64)
    cdef const long long[::1] aj = np.ascontiguousarray(jj, dtype=np.int64)
    cdef const double[::1] act = np.ascontiguousarray(actual, dtype=np.float64)
    cdef Py_ssize_t m, n_matches = ai.shape[0]
    cdef long long a, b
    cdef double e, delta
    with nogil:
        for m in range(n_matches):
            a = ai[m]
            b = aj[m]
            e = 1.0 / (1.0 + pow(base, (r[b] - r[a]) / scale))
            delta = k * (act[m] - e)
            r[a] += delta
            r[b] -= delta
            cnt[a] += 1
            cnt[b] += 1
    return ratings
