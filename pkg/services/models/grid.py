"""Exhaustive grid search with seeded k-fold cross-validation."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, Protocol, Sequence

import numpy as np
import pandas as pd

from core.config import settings
from core.errors import AllCombinationsFailed, TooFewSamples
from services.models.boosting import GbParams, fit_gb
from services.models.metrics import rmse
from services.models.svr import fit_svr
from tools.parallel import ordered_map

logger = logging.getLogger(__name__)

__all__ = [
    "Regressor",
    "FITTERS",
    "ParamGrid",
    "CvScore",
    "GridSearchResult",
    "kfold_indices",
    "fit_family",
    "grid_search",
]


class Regressor(Protocol):
    def predict(self, X: np.ndarray) -> np.ndarray: ...  # noqa: D401


FITTERS: dict[str, Callable[..., Regressor]] = {
    "gb": lambda X, y, **params: fit_gb(X, y, GbParams(**params)),
    "svr": fit_svr,
}


def fit_family(family: str, X: np.ndarray, y: np.ndarray, params: Mapping[str, Any]) -> Regressor:
    try:
        fitter = FITTERS[family]
    except KeyError:
        raise ValueError(f"Unknown model family '{family}'.") from None
    return fitter(X, y, **params)


@dataclass(frozen=True, slots=True)
class ParamGrid:
    """Named candidate lists, iterated as a row-major cartesian product."""

    values: Mapping[str, Sequence[Any]]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("A parameter grid needs at least one parameter.")
        for name, candidates in self.values.items():
            if len(candidates) == 0:
                raise ValueError(f"Grid entry '{name}' has no candidate values.")

    def __len__(self) -> int:
        size = 1
        for candidates in self.values.values():
            size *= len(candidates)
        return size

    def __iter__(self) -> Iterator[dict[str, Any]]:
        names = list(self.values)
        for combo in itertools.product(*(self.values[n] for n in names)):
            yield dict(zip(names, combo))


@dataclass(frozen=True, slots=True)
class CvScore:
    index: int
    params: dict[str, Any]
    fold_rmse: tuple[float, ...] = ()
    mean_rmse: float | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True, slots=True, eq=False)
class GridSearchResult:
    family: str
    best_index: int
    best_params: dict[str, Any]
    best_score: float
    scores: tuple[CvScore, ...]
    model: Regressor = field(repr=False)
    folds: int = 5
    seed: int = 0

    @property
    def failures(self) -> tuple[CvScore, ...]:
        return tuple(s for s in self.scores if s.failed)

    def score_frame(self) -> pd.DataFrame:
        """One row per combination and fold plus a ``mean`` row per combination."""
        rows: list[dict[str, Any]] = []
        for score in self.scores:
            base = {"family": self.family, "combination": score.index, **score.params}
            for fold, value in enumerate(score.fold_rmse):
                rows.append({**base, "fold": str(fold), "rmse": value, "error": ""})
            rows.append(
                {**base, "fold": "mean", "rmse": score.mean_rmse, "error": score.error or ""}
            )
        return pd.DataFrame(rows)


def kfold_indices(n: int, folds: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded shuffled folds as sorted ``(train, validation)`` index pairs."""
    if folds < 2:
        raise TooFewSamples("Cross-validation needs at least 2 folds.")
    if n < folds:
        raise TooFewSamples(f"{n} samples cannot fill {folds} folds.")
    chunks = np.array_split(np.random.default_rng(seed).permutation(n), folds)
    splits = []
    for f, chunk in enumerate(chunks):
        train = np.concatenate([c for g, c in enumerate(chunks) if g != f])
        splits.append((np.sort(train), np.sort(chunk)))
    return splits


def grid_search(
    family: str,
    grid: ParamGrid | Mapping[str, Sequence[Any]],
    X: np.ndarray,
    y: np.ndarray,
    folds: int = 5,
    seed: int = 0,
    max_workers: int | None = None,
) -> GridSearchResult:
    """Score every combination on the same folds and refit the best on all rows.

    The best combination has the lowest mean validation RMSE (earliest in
    iteration order on ties). A combination that raises is recorded with its
    error and skipped.
    """
    if not isinstance(grid, ParamGrid):
        grid = ParamGrid(dict(grid))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    splits = kfold_indices(y.size, folds, seed)

    def score(item: tuple[int, dict[str, Any]]) -> CvScore:
        index, params = item
        try:
            errors = tuple(
                rmse(y[val], fit_family(family, X[train], y[train], params).predict(X[val]))
                for train, val in splits
            )
        except Exception as exc:  # recorded per combination
            logger.warning("%s combination %d %s failed: %s", family, index, params, exc)
            return CvScore(index, params, error=f"{type(exc).__name__}: {exc}")
        mean = float(np.mean(errors))
        logger.debug("%s combination %d %s: mean CV RMSE %.6g", family, index, params, mean)
        return CvScore(index, params, errors, mean)

    workers = max_workers if max_workers is not None else settings.get_max_workers()
    scores = tuple(ordered_map(score, enumerate(grid), workers))

    best: CvScore | None = None
    for candidate in scores:
        if candidate.failed:
            continue
        if best is None or candidate.mean_rmse < best.mean_rmse:
            best = candidate
    if best is None:
        raise AllCombinationsFailed(f"All {len(scores)} {family} combinations failed.")

    logger.info("%s best combination %d %s (CV RMSE %.4g)", family, best.index, best.params, best.mean_rmse)
    model = fit_family(family, X, y, best.params)
    return GridSearchResult(
        family=family,
        best_index=best.index,
        best_params=dict(best.params),
        best_score=float(best.mean_rmse),
        scores=scores,
        model=model,
        folds=folds,
        seed=seed,
    )
