"""Least-squares regression tree grown best-first."""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

__all__ = ["DecisionTreeRegressor", "fit_tree"]

LEAF = -1


@dataclass(frozen=True, slots=True, eq=False)
class DecisionTreeRegressor:
    """Flat node arrays; ``feature[i] == -1`` marks a leaf.

    Rows with ``x[feature] <= threshold`` go to ``left``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    node_depth: np.ndarray
    max_depth: int | None
    max_leaf_nodes: int | None

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    @property
    def depth(self) -> int:
        return int(self.node_depth.max())

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        node = np.zeros(X.shape[0], dtype=int)
        rows = np.arange(X.shape[0])
        active = self.feature[node] != LEAF
        while active.any():
            current = node[active]
            go_left = X[rows[active], self.feature[current]] <= self.threshold[current]
            node[active] = np.where(go_left, self.left[current], self.right[current])
            active = self.feature[node] != LEAF
        return self.value[node]


@dataclass(slots=True)
class _Split:
    gain: float
    feature: int
    threshold: float
    left: np.ndarray
    right: np.ndarray


def _best_split(X: np.ndarray, y: np.ndarray, idx: np.ndarray) -> _Split | None:
    """Largest SSE reduction over all features and midpoints.

    Features are scanned in index order and thresholds ascending; a candidate
    replaces the incumbent only with a strictly larger gain.
    """
    n = idx.size
    if n < 2:
        return None
    y_node = y[idx]
    sse = float(np.sum((y_node - y_node.mean()) ** 2))
    min_gain = 1e-12 * max(1.0, sse)
    best: _Split | None = None
    n_left = np.arange(1, n)
    n_right = n - n_left
    for j in range(X.shape[1]):
        order = np.argsort(X[idx, j], kind="stable")
        xs = X[idx[order], j]
        ys = y_node[order]
        left_sum = np.cumsum(ys)[:-1]
        right_sum = ys.sum() - left_sum
        # n_l * n_r / n * (mean_l - mean_r)^2 equals the SSE reduction
        gain = (left_sum / n_left - right_sum / n_right) ** 2 * n_left * n_right / n
        gain[xs[:-1] >= xs[1:]] = -np.inf
        pos = int(np.argmax(gain))
        if gain[pos] <= min_gain or (best is not None and gain[pos] <= best.gain):
            continue
        threshold = 0.5 * (xs[pos] + xs[pos + 1])
        if threshold >= xs[pos + 1]:
            threshold = xs[pos]
        best = _Split(float(gain[pos]), j, float(threshold), idx[order[: pos + 1]], idx[order[pos + 1 :]])
    return best


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int | None = None,
    max_leaf_nodes: int | None = None,
) -> DecisionTreeRegressor:
    """Grow a tree by always splitting the leaf with the largest gain.

    Leaves with equal gain split in creation order. Growth stops when no
    split strictly reduces the squared error or a limit binds.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if X.shape[0] != y.shape[0] or y.size == 0:
        raise ValueError("X and y must hold the same, non-zero number of rows.")
    if max_leaf_nodes is not None and max_leaf_nodes < 1:
        raise ValueError("max_leaf_nodes must be >= 1.")
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be >= 0.")

    feature, threshold, left, right, value, depth = [LEAF], [0.0], [LEAF], [LEAF], [float(y.mean())], [0]
    heap: list[tuple[float, int, _Split]] = []

    def consider(node: int, idx: np.ndarray) -> None:
        if max_depth is not None and depth[node] >= max_depth:
            return
        split = _best_split(X, y, idx)
        if split is not None:
            heapq.heappush(heap, (-split.gain, node, split))

    consider(0, np.arange(y.size))
    leaves = 1
    while heap and (max_leaf_nodes is None or leaves < max_leaf_nodes):
        _, node, split = heapq.heappop(heap)
        children = []
        for members in (split.left, split.right):
            child = len(feature)
            feature.append(LEAF)
            threshold.append(0.0)
            left.append(LEAF)
            right.append(LEAF)
            value.append(float(y[members].mean()))
            depth.append(depth[node] + 1)
            children.append((child, members))
        feature[node] = split.feature
        threshold[node] = split.threshold
        left[node], right[node] = children[0][0], children[1][0]
        leaves += 1
        for child, members in children:
            consider(child, members)

    return DecisionTreeRegressor(
        feature=np.asarray(feature, dtype=int),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=int),
        right=np.asarray(right, dtype=int),
        value=np.asarray(value, dtype=float),
        node_depth=np.asarray(depth, dtype=int),
        max_depth=max_depth,
        max_leaf_nodes=max_leaf_nodes,
    )
