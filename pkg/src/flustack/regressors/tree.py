"""CART regression trees with weighted squared-error splitting.

Split thresholds sit at midpoints between consecutive distinct sorted
feature values; ``x[feature] <= threshold`` goes left.  Ties between
candidate splits resolve to the lowest feature index, then the lowest
threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .. import _kernels


@dataclass(frozen=True)
class Leaf:
    prediction: float
    weight: float


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Split]


def tree_fit(X, y, weights=None, max_depth: int = 3) -> TreeNode:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if y.shape != (n,):
        raise ValueError("y length must match the number of rows of X")
    if weights is None:
        w = np.ones(n)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (n,):
            raise ValueError("weights length must match the number of rows of X")
        if np.any(w < 0):
            raise ValueError("weights must be >= 0")
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if w.sum() <= 0:
        raise ValueError("total weight must be > 0")
    keep = w > 0  # zero-weight rows cannot affect any weighted criterion
    return _grow(X[keep], y[keep], w[keep], max_depth)


def _grow(X, y, w, depth_left) -> TreeNode:
    wsum = float(w.sum())
    wy = float(w @ y)
    mean = wy / wsum
    if depth_left == 0 or X.shape[0] < 2 or bool(np.all(X == X[0])):
        return Leaf(prediction=mean, weight=wsum)
    wyy = float(w @ (y * y))
    parent_sse = wyy - wy * wy / wsum
    if parent_sse <= 0.0:
        return Leaf(prediction=mean, weight=wsum)

    best_sse = np.inf
    best_feature = -1
    best_thr = 0.0
    for j in range(X.shape[1]):
        col = X[:, j]
        order = np.argsort(col, kind="stable")
        pos, sse = _kernels.split_scan(
            np.ascontiguousarray(col[order]),
            np.ascontiguousarray(y[order]),
            np.ascontiguousarray(w[order]),
        )
        if pos >= 0 and sse < best_sse:
            best_sse = sse
            best_feature = j
            xv = col[order]
            best_thr = 0.5 * (xv[pos] + xv[pos + 1])
    if best_feature < 0 or not best_sse < parent_sse:
        return Leaf(prediction=mean, weight=wsum)
    mask = X[:, best_feature] <= best_thr
    return Split(
        feature=best_feature,
        threshold=best_thr,
        left=_grow(X[mask], y[mask], w[mask], depth_left - 1),
        right=_grow(X[~mask], y[~mask], w[~mask], depth_left - 1),
    )


def tree_predict(node: TreeNode, x) -> float:
    x = np.asarray(x, dtype=float)
    while isinstance(node, Split):
        if node.feature >= x.shape[0]:
            raise IndexError(
                f"feature index {node.feature} out of range for input of size {x.shape[0]}"
            )
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.prediction


def tree_predict_many(node: TreeNode, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    out = np.empty(X.shape[0])
    _fill(node, X, np.arange(X.shape[0]), out)
    return out


def _fill(node, X, idx, out):
    if isinstance(node, Leaf):
        out[idx] = node.prediction
        return
    if node.feature >= X.shape[1]:
        raise IndexError(
            f"feature index {node.feature} out of range for input of width {X.shape[1]}"
        )
    left = X[idx, node.feature] <= node.threshold
    _fill(node.left, X, idx[left], out)
    _fill(node.right, X, idx[~left], out)
