"""AdaBoost.R2 over regression trees, linear loss, weighted-median output.

Per round: fit a tree under the current sample weights, normalize the
absolute errors by their max D, average them under the weights (L),
stop if L >= 0.5, otherwise give the tree weight ln(1/beta) with
beta = L / (1 - L) and reweight samples by beta^(1 - L_i).  A perfect
round (D = 0) keeps its tree with a large finite weight ln(1e9) and
stops.  Weighted fitting is used rather than resampling so fits are
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tree import TreeNode, tree_fit, tree_predict, tree_predict_many

PERFECT_WEIGHT = math.log(1e9)


@dataclass(frozen=True)
class AdaBoostFit:
    learners: tuple  # TreeNode committee
    learner_weights: np.ndarray
    max_depth: int
    rounds_run: int


def weighted_median(values, weights) -> float:
    """First value, in ascending order, whose cumulative weight reaches
    half the total."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.size == 0:
        raise ValueError("weighted_median of empty input")
    if values.shape != weights.shape:
        raise ValueError("values and weights must have equal lengths")
    if np.any(weights <= 0):
        raise ValueError("weights must be > 0")
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    idx = int(np.searchsorted(cum, cum[-1] / 2.0, side="left"))
    return float(values[order][idx])


def adaboost_r2_fit(X, y, T: int = 50, max_depth: int = 3) -> AdaBoostFit:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least 2 training samples")
    if T < 1:
        raise ValueError("T must be >= 1")

    w = np.full(n, 1.0 / n)
    learners: list[TreeNode] = []
    lweights: list[float] = []
    for _ in range(T):
        tree = tree_fit(X, y, w, max_depth)
        err = np.abs(tree_predict_many(tree, X) - y)
        D = float(err.max())
        if D == 0.0:
            learners.append(tree)
            lweights.append(PERFECT_WEIGHT)
            break
        # scalar loop keeps the pow/log arithmetic identical to a
        # straight-line transcription of the update rules
        L = [err[i] / D for i in range(n)]
        Lbar = 0.0
        for i in range(n):
            Lbar += w[i] * L[i]
        if Lbar >= 0.5:
            break
        beta = Lbar / (1.0 - Lbar)
        learners.append(tree)
        lweights.append(math.log(1.0 / beta))
        for i in range(n):
            w[i] = w[i] * math.pow(beta, 1.0 - L[i])
        w /= w.sum()
    if not learners:
        raise ValueError(
            "boosting rejected the first round (average loss >= 0.5); no committee"
        )
    return AdaBoostFit(
        learners=tuple(learners),
        learner_weights=np.asarray(lweights),
        max_depth=int(max_depth),
        rounds_run=len(learners),
    )


def adaboost_predict(fit: AdaBoostFit, x) -> float:
    if not fit.learners:
        raise ValueError("empty committee")
    preds = np.array([tree_predict(t, x) for t in fit.learners])
    return weighted_median(preds, fit.learner_weights)
