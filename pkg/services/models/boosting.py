"""Gradient boosting of regression trees with squared-error loss."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from services.models.tree import DecisionTreeRegressor, fit_tree

logger = logging.getLogger(__name__)

__all__ = ["GbParams", "GradientBoostRegressor", "fit_gb"]


@dataclass(frozen=True, slots=True)
class GbParams:
    max_depth: int | None = 3
    learning_rate: float = 0.1
    n_estimators: int = 100
    max_leaf_nodes: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.learning_rate <= 1.0:
            raise ValueError("learning_rate must lie in [0, 1].")
        if self.n_estimators < 0:
            raise ValueError("n_estimators must be >= 0.")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1.")
        if self.max_leaf_nodes is not None and self.max_leaf_nodes < 2:
            raise ValueError("max_leaf_nodes must be >= 2.")


@dataclass(frozen=True, slots=True, eq=False)
class GradientBoostRegressor:
    base: float
    learning_rate: float
    trees: tuple[DecisionTreeRegressor, ...]
    # train RMSE before the first round and after every round
    train_rmse: tuple[float, ...]
    params: GbParams

    @property
    def n_rounds(self) -> int:
        return len(self.trees)

    def predict(self, X: np.ndarray, n_rounds: int | None = None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full(X.shape[0], self.base)
        for tree in self.trees[:n_rounds]:
            out += self.learning_rate * tree.predict(X)
        return out


def fit_gb(
    X: np.ndarray, y: np.ndarray, params: GbParams | None = None, **overrides
) -> GradientBoostRegressor:
    """Fit trees to the residuals of the running prediction.

    Boosting stops early only once every residual is exactly zero.
    """
    if params is None:
        params = GbParams(**overrides)
    elif overrides:
        raise TypeError("Pass either params or keyword overrides, not both.")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)

    base = float(y.mean())
    prediction = np.full(y.size, base)
    residual = y - prediction
    history = [float(np.sqrt(np.mean(residual**2)))]
    trees: list[DecisionTreeRegressor] = []
    for _ in range(params.n_estimators):
        if not np.any(residual):
            break
        tree = fit_tree(X, residual, params.max_depth, params.max_leaf_nodes)
        trees.append(tree)
        prediction = prediction + params.learning_rate * tree.predict(X)
        residual = y - prediction
        history.append(float(np.sqrt(np.mean(residual**2))))
    if len(trees) < params.n_estimators:
        logger.debug("Boosting stopped after %d rounds: residuals vanished", len(trees))
    return GradientBoostRegressor(base, params.learning_rate, tuple(trees), tuple(history), params)
