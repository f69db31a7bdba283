# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the pure-numpy kernels in ``_pykernels``.

Same contracts, same iteration order and tie-breaking; only the inner
loops are lowered to C.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

cdef double INF = float("inf")


cdef double _cd_sweep(double[:, ::1] X, double[::1] rv, double[::1] bv,
                      double[::1] cs, Py_ssize_t[::1] idx, Py_ssize_t n_idx,
                      Py_ssize_t n, double lam, cnp.uint8_t[::1] nonneg) noexcept nogil:
    cdef Py_ssize_t k, j, i
    cdef double acc, cj, bj, rho, bnew, d, ad
    cdef double max_delta = 0.0
    for k in range(n_idx):
        j = idx[k]
        cj = cs[j]
        if cj <= 0.0:
            continue
        bj = bv[j]
        acc = 0.0
        for i in range(n):
            acc += X[i, j] * rv[i]
        rho = acc / n + cj * bj
        if nonneg[j]:
            bnew = (rho - lam) / cj if rho - lam > 0.0 else 0.0
        elif rho > lam:
            bnew = (rho - lam) / cj
        elif rho < -lam:
            bnew = (rho + lam) / cj
        else:
            bnew = 0.0
        d = bnew - bj
        if d != 0.0:
            for i in range(n):
                rv[i] -= d * X[i, j]
            bv[j] = bnew
        ad = -d if d < 0.0 else d
        if ad > max_delta:
            max_delta = ad
    return max_delta


def lasso_cd(cnp.ndarray[cnp.float64_t, ndim=2] Xs,
             cnp.ndarray[cnp.float64_t, ndim=1] yc,
             double lam, nonneg_mask, int max_sweeps, double tol,
             beta0=None):
    cdef Py_ssize_t n = Xs.shape[0]
    cdef Py_ssize_t p = Xs.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] beta
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r
    cdef double[:, ::1] X = np.ascontiguousarray(Xs)
    if beta0 is None:
        beta = np.zeros(p)
        r = yc.copy()
    else:
        beta = np.array(beta0, dtype=np.float64, copy=True)
        r = yc - Xs @ beta
    cdef cnp.ndarray[cnp.float64_t, ndim=1] colsq = np.zeros(p)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] idx = np.arange(p, dtype=np.intp)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mask = np.ascontiguousarray(nonneg_mask, dtype=np.uint8)
    cdef double[::1] rv = r
    cdef double[::1] bv = beta
    cdef double[::1] cs = colsq
    cdef Py_ssize_t[::1] iv = idx
    cdef cnp.uint8_t[::1] mv = mask
    cdef Py_ssize_t i, j, n_active
    cdef int sweeps = 0
    cdef double acc

    for j in range(p):
        acc = 0.0
        for i in range(n):
            acc += X[i, j] * X[i, j]
        cs[j] = acc / n

    while sweeps < max_sweeps:
        sweeps += 1
        for j in range(p):
            iv[j] = j
        if _cd_sweep(X, rv, bv, cs, iv, p, n, lam, mv) < tol:
            break
        n_active = 0
        for j in range(p):
            if bv[j] != 0.0:
                iv[n_active] = j
                n_active += 1
        while sweeps < max_sweeps and n_active < p:
            sweeps += 1
            if _cd_sweep(X, rv, bv, cs, iv, n_active, n, lam, mv) < tol:
                break
    return beta, sweeps


def svr_smo(cnp.ndarray[cnp.float64_t, ndim=2] K,
            cnp.ndarray[cnp.float64_t, ndim=1] y,
            double C, double eps, double tol, long max_pairs):
    cdef Py_ssize_t n = y.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.zeros(2 * n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] h = np.zeros(n)
    cdef double[:, ::1] Kv = np.ascontiguousarray(K)
    cdef double[::1] xv = x
    cdef double[::1] hv = h
    cdef double[::1] yv = y
    cdef double snap = 1e-12 * C
    cdef double tau = 1e-12
    cdef long pairs = 0
    cdef double violation = INF
    cdef Py_ssize_t q, s, i, j, si, sj
    cdef double val, m, M, ai, aj, eta, t, box_i, box_j, xi, xj
    cdef double delta, gain, best_gain, d

    while True:
        # maximal violator on the "up" side; M only for the stopping rule
        m = -INF
        M = INF
        i = -1
        for q in range(2 * n):
            s = q if q < n else q - n
            if q < n:
                val = yv[s] - hv[s] - eps
                if xv[q] < C and val > m:
                    m = val
                    i = q
                if xv[q] > 0.0 and val < M:
                    M = val
            else:
                val = yv[s] - hv[s] + eps
                if xv[q] > 0.0 and val > m:
                    m = val
                    i = q
                if xv[q] < C and val < M:
                    M = val
        if i < 0 or M == INF:
            violation = 0.0
            break
        violation = m - M
        if violation < tol or pairs >= max_pairs:
            break
        si = i if i < n else i - n
        # second-order partner: largest decrease delta^2 / eta
        best_gain = -INF
        j = -1
        d = 0.0
        for q in range(2 * n):
            s = q if q < n else q - n
            if q < n:
                if xv[q] <= 0.0:
                    continue
                val = yv[s] - hv[s] - eps
            else:
                if xv[q] >= C:
                    continue
                val = yv[s] - hv[s] + eps
            delta = m - val
            if delta <= 0.0:
                continue
            eta = Kv[si, si] + Kv[s, s] - 2.0 * Kv[si, s]
            if eta < tau:
                eta = tau
            gain = delta * delta / eta
            if gain > best_gain:
                best_gain = gain
                j = q
                d = delta
        if j < 0:
            break
        sj = j if j < n else j - n
        ai = 1.0 if i < n else -1.0
        aj = 1.0 if j < n else -1.0
        eta = Kv[si, si] + Kv[sj, sj] - 2.0 * Kv[si, sj]
        t = d / eta if eta > tau else INF
        box_i = C - xv[i] if ai > 0.0 else xv[i]
        box_j = xv[j] if aj > 0.0 else C - xv[j]
        if box_i < t:
            t = box_i
        if box_j < t:
            t = box_j
        xi = xv[i] + ai * t
        xj = xv[j] - aj * t
        xv[i] = 0.0 if xi < snap else (C if xi > C - snap else xi)
        xv[j] = 0.0 if xj < snap else (C if xj > C - snap else xj)
        if si != sj:
            for q in range(n):
                hv[q] += t * (Kv[q, si] - Kv[q, sj])
        pairs += 1
    return x, violation, pairs


def split_scan(cnp.ndarray[cnp.float64_t, ndim=1] xv,
               cnp.ndarray[cnp.float64_t, ndim=1] yv,
               cnp.ndarray[cnp.float64_t, ndim=1] wv):
    cdef Py_ssize_t n = xv.shape[0]
    cdef double[::1] xs = xv
    cdef double[::1] ys = yv
    cdef double[::1] ws = wv
    cdef double W = 0.0, SY = 0.0, SYY = 0.0
    cdef double lw = 0.0, ly = 0.0, lyy = 0.0
    cdef double rw, ry, ryy, sse
    cdef double best = INF
    cdef Py_ssize_t pos = -1
    cdef Py_ssize_t k

    for k in range(n):
        W += ws[k]
        SY += ws[k] * ys[k]
        SYY += ws[k] * ys[k] * ys[k]
    for k in range(n - 1):
        lw += ws[k]
        ly += ws[k] * ys[k]
        lyy += ws[k] * ys[k] * ys[k]
        if xs[k + 1] <= xs[k]:
            continue
        rw = W - lw
        ry = SY - ly
        ryy = SYY - lyy
        sse = (lyy - ly * ly / lw) + (ryy - ry * ry / rw)
        if sse < best:
            best = sse
            pos = k
    return pos, best
