"""Epsilon-insensitive support vector regression (linear and RBF kernels).

The dual problem is solved by maximal-violating-pair SMO; residuals
smaller than epsilon cost nothing.  Features are standardized
internally; the bias comes from the free dual variables when any exist,
otherwise from the KKT bound midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels

KKT_TOL = 1e-3
MAX_PAIR_UPDATES = 100_000
FAIL_VIOLATION = 1e-1

KERNELS = ("linear", "rbf")


class NonConvergenceError(RuntimeError):
    """SMO hit the pair-update cap with a KKT violation above 1e-1."""


@dataclass(frozen=True)
class SvrFit:
    dual_coeffs: np.ndarray  # alpha_i - alpha*_i per training sample
    bias: float
    kernel: str
    gamma: float | None
    C: float
    epsilon: float
    support_inputs: np.ndarray  # standardized training rows
    feature_means: np.ndarray
    feature_stds: np.ndarray
    kkt_violation: float
    n_pair_updates: int


def kernel_eval(kernel: str, gamma, x, z) -> float:
    """linear -> dot(x, z); rbf -> exp(-gamma * ||x - z||^2)."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape != z.shape:
        raise ValueError("kernel arguments must have equal dimensions")
    if kernel == "linear":
        return float(x @ z)
    if kernel == "rbf":
        if gamma is None or gamma <= 0:
            raise ValueError("rbf kernel requires gamma > 0")
        d = x - z
        return float(np.exp(-gamma * (d @ d)))
    raise ValueError(f"unknown kernel {kernel!r}")


def _standardize(X):
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    ok = stds > 0.0
    Xs = np.zeros_like(X)
    Xs[:, ok] = (X[:, ok] - means[ok]) / stds[ok]
    return Xs, means, stds


def _gram(Xs, kernel, gamma):
    if kernel == "linear":
        return Xs @ Xs.T
    sq = np.einsum("ij,ij->i", Xs, Xs)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (Xs @ Xs.T)
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-gamma * d2)


def _cross_kernel(Xs, Z, kernel, gamma):
    if kernel == "linear":
        return Z @ Xs.T
    d2 = (
        np.einsum("ij,ij->i", Z, Z)[:, None]
        + np.einsum("ij,ij->i", Xs, Xs)[None, :]
        - 2.0 * (Z @ Xs.T)
    )
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-gamma * d2)


def svr_fit(X, y, C: float, epsilon: float, kernel: str = "rbf", gamma=None) -> SvrFit:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ValueError("X must be n x p and y length n")
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least 2 training samples")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite entries in the design or target")
    if C <= 0:
        raise ValueError(f"C must be > 0, got {C}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if kernel == "rbf" and (gamma is None or gamma <= 0):
        raise ValueError("rbf kernel requires gamma > 0")
    if kernel == "linear":
        gamma = None

    Xs, means, stds = _standardize(X)
    K = _gram(Xs, kernel, gamma)
    x2n, violation, pairs = _kernels.svr_smo(
        K, y, float(C), float(epsilon), KKT_TOL, MAX_PAIR_UPDATES
    )
    if pairs >= MAX_PAIR_UPDATES and violation > FAIL_VIOLATION:
        raise NonConvergenceError(
            f"SMO stopped after {pairs} pair updates with KKT violation {violation:.3g}"
        )
    beta = x2n[:n] - x2n[n:]
    h = K @ beta
    bias = _bias(x2n, h, y, float(C), float(epsilon))
    return SvrFit(
        dual_coeffs=beta,
        bias=bias,
        kernel=kernel,
        gamma=gamma,
        C=float(C),
        epsilon=float(epsilon),
        support_inputs=Xs,
        feature_means=means,
        feature_stds=stds,
        kkt_violation=float(violation),
        n_pair_updates=int(pairs),
    )


def _bias(x2n, h, y, C, eps):
    n = y.shape[0]
    alpha, alpha_s = x2n[:n], x2n[n:]
    free_a = (alpha > 0.0) & (alpha < C)
    free_s = (alpha_s > 0.0) & (alpha_s < C)
    cands = np.concatenate([(y - h - eps)[free_a], (y - h + eps)[free_s]])
    if cands.size:
        return float(cands.mean())
    v_a = y - h - eps
    v_s = y - h + eps
    m = max(
        np.max(np.where(alpha < C, v_a, -np.inf)),
        np.max(np.where(alpha_s > 0.0, v_s, -np.inf)),
    )
    M = min(
        np.min(np.where(alpha > 0.0, v_a, np.inf)),
        np.min(np.where(alpha_s < C, v_s, np.inf)),
    )
    if not (np.isfinite(m) and np.isfinite(M)):
        return float(np.mean(y))
    return float((m + M) / 2.0)


def svr_predict(fit: SvrFit, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (fit.support_inputs.shape[1],):
        raise ValueError(
            f"feature dimension mismatch: expected {fit.support_inputs.shape[1]}, got {x.shape}"
        )
    return float(svr_predict_many(fit, x[None, :])[0])


def svr_predict_many(fit: SvrFit, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != fit.support_inputs.shape[1]:
        raise ValueError("feature dimension mismatch")
    ok = fit.feature_stds > 0.0
    Z = np.zeros_like(X)
    Z[:, ok] = (X[:, ok] - fit.feature_means[ok]) / fit.feature_stds[ok]
    Kx = _cross_kernel(fit.support_inputs, Z, fit.kernel, fit.gamma)
    return Kx @ fit.dual_coeffs + fit.bias
