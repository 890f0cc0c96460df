"""Regression metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.errors import DimensionMismatch, TooFewSamples, ZeroVarianceTarget

__all__ = ["MetricPair", "rmse", "r_squared", "evaluate"]


@dataclass(frozen=True, slots=True)
class MetricPair:
    rmse: float
    r2: float

    def to_dict(self) -> dict[str, float]:
        return {"rmse": self.rmse, "r2": self.r2}


def _pair(y_true, y_pred) -> tuple[np.ndarray, np.ndarray]:
    y_true = np.asarray(y_true, dtype=float).ravel()
    y_pred = np.asarray(y_pred, dtype=float).ravel()
    if y_true.size != y_pred.size:
        raise DimensionMismatch(y_true.size, y_pred.size)
    if y_true.size == 0:
        raise TooFewSamples("Metrics need at least one value.")
    return y_true, y_pred


def rmse(y_true, y_pred) -> float:
    y_true, y_pred = _pair(y_true, y_pred)
    return float(np.sqrt(np.mean((y_true - y_pred) ** 2)))


def r_squared(y_true, y_pred, force_finite: bool = False) -> float:
    """``1 - SS_res / SS_tot``.

    A constant *y_true* raises ``ZeroVarianceTarget`` unless *force_finite*,
    in which case the score is 1.0 for an exact prediction and 0.0 otherwise.
    """
    y_true, y_pred = _pair(y_true, y_pred)
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    if np.ptp(y_true) == 0:
        if not force_finite:
            raise ZeroVarianceTarget("R^2 is undefined for a constant target.")
        return 1.0 if ss_res == 0 else 0.0
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    return 1.0 - ss_res / ss_tot


def evaluate(y_true, y_pred) -> MetricPair:
    return MetricPair(rmse(y_true, y_pred), r_squared(y_true, y_pred, force_finite=True))
