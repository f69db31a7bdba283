"""Pure-numpy implementations of the hot numerical kernels.

These mirror the compiled versions in ``_speedups.pyx`` operation for
operation; either backend must satisfy the same convergence contracts.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def lasso_cd(Xs, yc, lam, nonneg_mask, max_sweeps, tol, beta0=None):
    """Cyclic coordinate descent for the lasso on standardized data.

    Minimizes (1/2n)||yc - Xs b||^2 + lam * sum|b_j|, with b_j >= 0
    wherever ``nonneg_mask`` is set.  Columns with zero norm keep
    coefficient 0.  ``beta0`` warm-starts the solve (path fitting).
    After every full sweep the nonzero coordinates are iterated to
    tolerance before the next full pass; convergence is declared only by
    a full sweep.  Returns (beta, sweeps).
    """
    n, p = Xs.shape
    colsq = np.einsum("ij,ij->j", Xs, Xs) / n
    if beta0 is None:
        beta = np.zeros(p)
        r = yc.astype(float).copy()
    else:
        beta = np.asarray(beta0, dtype=float).copy()
        r = yc - Xs @ beta

    def sweep(indices):
        max_delta = 0.0
        for j in indices:
            cj = colsq[j]
            if cj <= 0.0:
                continue
            bj = beta[j]
            rho = (Xs[:, j] @ r) / n + cj * bj
            if nonneg_mask[j]:
                bnew = (rho - lam) / cj if rho - lam > 0.0 else 0.0
            elif rho > lam:
                bnew = (rho - lam) / cj
            elif rho < -lam:
                bnew = (rho + lam) / cj
            else:
                bnew = 0.0
            d = bnew - bj
            if d != 0.0:
                r -= d * Xs[:, j]
                beta[j] = bnew
            ad = abs(d)
            if ad > max_delta:
                max_delta = ad
        return max_delta

    all_idx = range(p)
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        if sweep(all_idx) < tol:
            break
        active = [j for j in all_idx if beta[j] != 0.0]
        while sweeps < max_sweeps and len(active) < p:
            sweeps += 1
            if sweep(active) < tol:
                break
    return beta, sweeps


def svr_smo(K, y, C, eps, tol, max_pairs):
    """SMO for the epsilon-SVR dual with second-order pair selection.

    Works on the 2n box-constrained variables (alpha, alpha*) with the
    single equality constraint sum(alpha - alpha*) = 0.  Each step pairs
    the maximal KKT violator with the partner giving the largest
    objective decrease; plain max-vs-min pairing zigzags far past the
    update cap on near-collinear designs.  ``K`` is the precomputed
    kernel Gram matrix.  Returns (x, violation, pairs) where ``x[:n]``
    holds alpha and ``x[n:]`` alpha*.
    """
    n = y.shape[0]
    x = np.zeros(2 * n)
    h = np.zeros(n)  # K @ (alpha - alpha*)
    Kd = np.ascontiguousarray(np.diag(K))
    snap = 1e-12 * C
    tau = 1e-12
    pairs = 0
    violation = np.inf
    while True:
        v_a = y - h - eps  # candidate b from the alpha side
        v_s = y - h + eps  # candidate b from the alpha* side
        up = np.concatenate(
            [np.where(x[:n] < C, v_a, -np.inf), np.where(x[n:] > 0.0, v_s, -np.inf)]
        )
        dn = np.concatenate(
            [np.where(x[:n] > 0.0, v_a, np.inf), np.where(x[n:] < C, v_s, np.inf)]
        )
        i = int(np.argmax(up))
        m = up[i]
        M = np.min(dn)
        if not np.isfinite(m) or not np.isfinite(M):
            violation = 0.0
            break
        violation = m - M
        if violation < tol or pairs >= max_pairs:
            break
        si = i % n
        delta = m - dn
        eta_all = np.maximum(Kd[si] + np.concatenate([Kd, Kd]) - 2.0 * np.concatenate([K[si], K[si]]), tau)
        gain = np.where(delta > 0.0, delta * delta / eta_all, -np.inf)
        j = int(np.argmax(gain))
        sj = j % n
        ai = 1.0 if i < n else -1.0
        aj = 1.0 if j < n else -1.0
        eta = K[si, si] + K[sj, sj] - 2.0 * K[si, sj]
        d = m - dn[j]
        t = d / eta if eta > tau else np.inf
        box_i = C - x[i] if ai > 0 else x[i]
        box_j = x[j] if aj > 0 else C - x[j]
        t = min(t, box_i, box_j)
        xi = x[i] + ai * t
        xj = x[j] - aj * t
        x[i] = 0.0 if xi < snap else (C if xi > C - snap else xi)
        x[j] = 0.0 if xj < snap else (C if xj > C - snap else xj)
        if si != sj:
            h += t * (K[:, si] - K[:, sj])
        pairs += 1
    return x, float(violation), pairs


def split_scan(xv, yv, wv):
    """Best split boundary for one sorted feature column.

    ``xv`` must be ascending; weights must be positive.  Returns
    (pos, sse): the split puts rows [0..pos] left, and ``sse`` is the
    total weighted SSE of both children.  pos == -1 if no boundary
    between distinct values exists.  Ties resolve to the lowest
    position, i.e. the lowest threshold.
    """
    cw = np.cumsum(wv)
    cwy = np.cumsum(wv * yv)
    cwyy = np.cumsum(wv * yv * yv)
    W, SY, SYY = cw[-1], cwy[-1], cwyy[-1]
    lw, ly, lyy = cw[:-1], cwy[:-1], cwyy[:-1]
    rw, ry, ryy = W - lw, SY - ly, SYY - lyy
    with np.errstate(invalid="ignore", divide="ignore"):
        sse = (lyy - ly * ly / lw) + (ryy - ry * ry / rw)
    valid = xv[1:] > xv[:-1]
    if not valid.any():
        return -1, np.inf
    sse = np.where(valid, sse, np.inf)
    pos = int(np.argmin(sse))
    return pos, float(sse[pos])
