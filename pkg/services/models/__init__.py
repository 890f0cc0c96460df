"""Regression models, metrics and hyperparameter search."""

from services.models.boosting import GbParams, GradientBoostRegressor, fit_gb
from services.models.grid import (
    CvScore,
    GridSearchResult,
    ParamGrid,
    Regressor,
    fit_family,
    grid_search,
    kfold_indices,
)
from services.models.metrics import MetricPair, evaluate, r_squared, rmse
from services.models.svr import SvrModel, SvrParams, fit_svr, kkt_violation
from services.models.tree import DecisionTreeRegressor, fit_tree

__all__ = [
    "CvScore",
    "DecisionTreeRegressor",
    "GbParams",
    "GradientBoostRegressor",
    "GridSearchResult",
    "MetricPair",
    "ParamGrid",
    "Regressor",
    "SvrModel",
    "SvrParams",
    "evaluate",
    "fit_family",
    "fit_gb",
    "fit_svr",
    "fit_tree",
    "grid_search",
    "kfold_indices",
    "kkt_violation",
    "r_squared",
    "rmse",
]
