"""Epsilon-insensitive support vector regression with an RBF kernel.

The dual is solved by sequential minimal optimisation over the stacked
variables ``beta = [alpha+, alpha-]`` (labels +1 / -1) with the maximal
violating pair as working set, as LIBSVM does.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

logger = logging.getLogger(__name__)

__all__ = ["SvrParams", "SvrModel", "fit_svr", "rbf_kernel", "kkt_violation"]

TOLERANCE = 1e-3
MAX_ITER = 100_000
TAU = 1e-12


@dataclass(frozen=True, slots=True)
class SvrParams:
    C: float = 1.0
    gamma: float = 0.1
    epsilon: float = 0.1
    kernel: str = "rbf"

    def __post_init__(self) -> None:
        if self.kernel != "rbf":
            raise ValueError(f"Unsupported kernel '{self.kernel}'; only 'rbf' is implemented.")
        if self.C <= 0 or self.gamma <= 0 or self.epsilon <= 0:
            raise ValueError("C, gamma and epsilon must be > 0.")


@dataclass(frozen=True, slots=True, eq=False)
class SvrModel:
    """``f(x) = sum_i coef_i * exp(-gamma * |x - x_i|^2) + bias``."""

    params: SvrParams
    support_vectors: np.ndarray
    dual_coef: np.ndarray
    bias: float
    alpha_plus: np.ndarray
    alpha_minus: np.ndarray
    n_iter: int
    kkt_violation: float
    converged: bool

    @property
    def C(self) -> float:
        return self.params.C

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.support_vectors.shape[0] == 0:
            return np.full(X.shape[0], self.bias)
        return rbf_kernel(X, self.support_vectors, self.params.gamma) @ self.dual_coef + self.bias


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * cdist(A, B, "sqeuclidean"))


def _violating_pair(
    gradient: np.ndarray, beta: np.ndarray, labels: np.ndarray, C: float
) -> tuple[int, int, float]:
    """Return ``(i, j, m - M)`` for the maximal violating pair."""
    score = -labels * gradient
    positive = labels > 0
    up = (positive & (beta < C)) | (~positive & (beta > 0))
    low = (positive & (beta > 0)) | (~positive & (beta < C))
    if not up.any() or not low.any():
        return -1, -1, 0.0
    up_scores = np.where(up, score, -np.inf)
    low_scores = np.where(low, score, np.inf)
    i = int(np.argmax(up_scores))
    j = int(np.argmin(low_scores))
    return i, j, float(up_scores[i] - low_scores[j])


def _rho(gradient: np.ndarray, beta: np.ndarray, labels: np.ndarray, C: float) -> float:
    y_grad = labels * gradient
    at_upper = beta >= C
    at_lower = beta <= 0
    free = ~(at_upper | at_lower)
    if free.any():
        return float(y_grad[free].mean())
    positive = labels > 0
    ub_mask = (at_upper & ~positive) | (at_lower & positive)
    lb_mask = (at_upper & positive) | (at_lower & ~positive)
    ub = y_grad[ub_mask].min() if ub_mask.any() else np.inf
    lb = y_grad[lb_mask].max() if lb_mask.any() else -np.inf
    return float((ub + lb) / 2.0)


def _clip_pair(
    ai: float, aj: float, old_i: float, old_j: float, same_sign: bool, C: float
) -> tuple[float, float]:
    if not same_sign:
        diff = old_i - old_j
        if diff > 0:
            if aj < 0:
                aj, ai = 0.0, diff
        elif ai < 0:
            ai, aj = 0.0, -diff
        if diff > 0:
            if ai > C:
                ai, aj = C, C - diff
        elif aj > C:
            aj, ai = C, C + diff
        return ai, aj
    total = old_i + old_j
    if total > C:
        if ai > C:
            ai, aj = C, total - C
    elif aj < 0:
        aj, ai = 0.0, total
    if total > C:
        if aj > C:
            aj, ai = C, total - C
    elif ai < 0:
        ai, aj = 0.0, total
    return ai, aj


def fit_svr(
    X: np.ndarray,
    y: np.ndarray,
    C: float = 1.0,
    gamma: float = 0.1,
    epsilon: float = 0.1,
    kernel: str = "rbf",
    *,
    tol: float = TOLERANCE,
    max_iter: int = MAX_ITER,
) -> SvrModel:
    """Solve the epsilon-SVR dual until the KKT gap drops below *tol*.

    Hitting *max_iter* leaves ``converged`` False and logs a warning.
    """
    params = SvrParams(C, gamma, epsilon, kernel)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    n = y.size
    if X.shape[0] != n or n == 0:
        raise ValueError("X and y must hold the same, non-zero number of rows.")

    K = rbf_kernel(X, X, gamma)
    labels = np.concatenate([np.ones(n), -np.ones(n)])
    beta = np.zeros(2 * n)
    gradient = np.concatenate([epsilon - y, epsilon + y])
    diag = np.concatenate([np.diag(K), np.diag(K)])

    def column(t: int) -> np.ndarray:
        k = K[:, t % n]
        return labels[t] * labels * np.concatenate([k, k])

    n_iter, gap = 0, 0.0
    while True:
        i, j, gap = _violating_pair(gradient, beta, labels, C)
        if i < 0 or gap < tol or n_iter >= max_iter:
            break
        n_iter += 1
        q_i, q_j = column(i), column(j)
        old_i, old_j = beta[i], beta[j]
        same_sign = labels[i] == labels[j]
        if same_sign:
            quad = diag[i] + diag[j] - 2.0 * q_i[j]
            delta = (gradient[i] - gradient[j]) / max(quad, TAU)
            ai, aj = old_i - delta, old_j + delta
        else:
            quad = diag[i] + diag[j] + 2.0 * q_i[j]
            delta = (-gradient[i] - gradient[j]) / max(quad, TAU)
            ai, aj = old_i + delta, old_j + delta
        ai, aj = _clip_pair(ai, aj, old_i, old_j, same_sign, C)
        beta[i], beta[j] = ai, aj
        gradient += q_i * (ai - old_i) + q_j * (aj - old_j)

    converged = gap < tol or i < 0
    if not converged:
        logger.warning(
            "SVR stopped at the %d-iteration cap with KKT gap %.3g (C=%g, gamma=%g, epsilon=%g)",
            max_iter, gap, C, gamma, epsilon,
        )

    rho = _rho(gradient, beta, labels, C)
    alpha_plus, alpha_minus = beta[:n].copy(), beta[n:].copy()
    coef = alpha_plus - alpha_minus
    support = np.flatnonzero(coef != 0)
    return SvrModel(
        params=params,
        support_vectors=X[support].copy(),
        dual_coef=coef[support],
        bias=-rho,
        alpha_plus=alpha_plus,
        alpha_minus=alpha_minus,
        n_iter=n_iter,
        kkt_violation=max(gap, 0.0),
        converged=converged,
    )


def kkt_violation(model: SvrModel, X: np.ndarray, y: np.ndarray) -> float:
    """Recompute the maximal-pair KKT gap of *model* from its stored duals."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    K = rbf_kernel(X, X, model.params.gamma)
    coef = model.alpha_plus - model.alpha_minus
    Kc = K @ coef
    eps = model.params.epsilon
    gradient = np.concatenate([Kc + eps - y, -Kc + eps + y])
    beta = np.concatenate([model.alpha_plus, model.alpha_minus])
    labels = np.concatenate([np.ones(y.size), -np.ones(y.size)])
    _, _, gap = _violating_pair(gradient, beta, labels, model.params.C)
    return max(gap, 0.0)
