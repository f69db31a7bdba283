"""Hyperparameter selection by blocked cross-validation.

Folds are contiguous index blocks in the given row order (no shuffling,
so the temporal structure of a training set survives).  Fold f validates
block f and trains on everything else.  Ties in mean validation RMSE
resolve to the earliest grid entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CvPlan:
    n_folds: int = 5
    grid: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_folds < 2:
            raise ValueError("need at least 2 folds")
        if not self.grid:
            raise ValueError("empty hyperparameter grid")


def _blocks(n, k):
    sizes = [n // k + (1 if f < n % k else 0) for f in range(k)]
    bounds = np.cumsum([0] + sizes)
    return [(int(bounds[f]), int(bounds[f + 1])) for f in range(k)]


def cv_select(X, y, plan: CvPlan, fit_fn):
    """Pick the grid entry with the lowest mean validation RMSE.

    ``fit_fn(X_train, y_train, params)`` must return a callable mapping a
    validation matrix to predictions.  Returns (best_params, table) where
    the table rows are (params, mean_rmse, fold_rmses).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n < 2 * plan.n_folds:
        raise ValueError(
            f"too few rows for {plan.n_folds}-fold validation: {n} < {2 * plan.n_folds}"
        )
    blocks = _blocks(n, plan.n_folds)
    table = []
    best_params = None
    best_rmse = np.inf
    for params in plan.grid:
        fold_rmses = []
        for lo, hi in blocks:
            tr = np.concatenate([np.arange(0, lo), np.arange(hi, n)])
            predict = fit_fn(X[tr], y[tr], params)
            pred = np.asarray(predict(X[lo:hi]), dtype=float)
            resid = pred - y[lo:hi]
            fold_rmses.append(float(np.sqrt(np.mean(resid * resid))))
        mean_rmse = float(np.mean(fold_rmses))
        table.append((params, mean_rmse, fold_rmses))
        if mean_rmse < best_rmse:
            best_rmse = mean_rmse
            best_params = params
    return best_params, table
