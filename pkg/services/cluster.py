"""k-means with k-means++ seeding, elbow selection and silhouette validation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from core.config import settings
from core.errors import DimensionMismatch, SingleCluster, TooFewSamples
from tools.parallel import ordered_map

logger = logging.getLogger(__name__)

__all__ = [
    "KMeansModel",
    "ElbowCurve",
    "SilhouetteReport",
    "SilhouetteValidation",
    "kmeans_plus_plus",
    "kmeans_fit",
    "assign",
    "select_elbow",
    "elbow_scan",
    "silhouette",
    "validate_k",
]

LOW_CURVATURE_FRACTION = 0.05


@dataclass(frozen=True, slots=True, eq=False)
class KMeansModel:
    k: int
    centroids: np.ndarray
    labels: np.ndarray
    inertia: float
    n_iter: int
    seed: int
    # inertia of the winning restart after each assignment step
    inertia_history: tuple[float, ...] = ()
    restart: int = 0

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "centroids": self.centroids.tolist(),
            "inertia": self.inertia,
            "n_iter": self.n_iter,
            "seed": self.seed,
            "restart": self.restart,
        }


@dataclass(frozen=True, slots=True, eq=False)
class ElbowCurve:
    k_values: tuple[int, ...]
    wcss: tuple[float, ...]
    selected_k: int
    low_curvature: bool = False
    degenerate: bool = False
    models: tuple[KMeansModel, ...] = field(default=(), repr=False)

    def model_for(self, k: int) -> KMeansModel | None:
        for model in self.models:
            if model.k == k:
                return model
        return None


@dataclass(frozen=True, slots=True, eq=False)
class SilhouetteReport:
    values: np.ndarray
    mean: float


@dataclass(frozen=True, slots=True)
class SilhouetteValidation:
    """Silhouette means over the scanned k values (k >= 2)."""

    scores: tuple[tuple[int, float], ...]
    best_k: int | None
    selected_k: int
    validated: bool


# ---------------------------------------------------------------------------
# Distances and assignment
# ---------------------------------------------------------------------------


def _squared_distances(matrix: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = matrix[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _nearest(matrix: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    distances = _squared_distances(matrix, centroids)
    # argmin returns the first index on ties, i.e. the lowest centroid
    labels = np.argmin(distances, axis=1)
    return labels, distances[np.arange(matrix.shape[0]), labels]


def _repair_empty(
    labels: np.ndarray, d2: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Give every empty cluster the point farthest from its own centroid."""
    labels, d2 = labels.copy(), d2.copy()
    for empty in np.flatnonzero(np.bincount(labels, minlength=k) == 0):
        counts = np.bincount(labels, minlength=k)
        donors = counts[labels] > 1
        candidate = np.where(donors, d2, -np.inf)
        point = int(np.argmax(candidate))
        labels[point] = empty
        d2[point] = 0.0
    return labels, d2


def _as_points(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix[:, None]
    if matrix.ndim != 2:
        raise DimensionMismatch(2, matrix.ndim)
    return matrix


def assign(model: KMeansModel, matrix: np.ndarray) -> np.ndarray:
    """Nearest-centroid labels; ties go to the lowest centroid index."""
    matrix = _as_points(matrix)
    if matrix.shape[1] != model.centroids.shape[1]:
        raise DimensionMismatch(model.centroids.shape[1], matrix.shape[1])
    labels, _ = _nearest(matrix, model.centroids)
    return labels


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------


def kmeans_plus_plus(matrix: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """D^2-weighted seeding; uniform draw when every point is already covered."""
    n = matrix.shape[0]
    centres = [int(rng.integers(n))]
    d2 = np.sum((matrix - matrix[centres[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            nxt = int(rng.integers(n))
        centres.append(nxt)
        d2 = np.minimum(d2, np.sum((matrix - matrix[nxt]) ** 2, axis=1))
    return matrix[centres].copy()


@dataclass(slots=True)
class _Run:
    centroids: np.ndarray
    labels: np.ndarray
    inertia: float
    n_iter: int
    history: list[float]


def _lloyd(
    matrix: np.ndarray, centroids: np.ndarray, max_iter: int, tol: float
) -> _Run:
    k = centroids.shape[0]
    history: list[float] = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        labels, d2 = _nearest(matrix, centroids)
        history.append(float(d2.sum()))
        labels, d2 = _repair_empty(labels, d2, k)
        updated = np.vstack([matrix[labels == j].mean(axis=0) for j in range(k)])
        shift = float(np.max(np.linalg.norm(updated - centroids, axis=1)))
        centroids = updated
        if shift < tol:
            break

    labels, d2 = _nearest(matrix, centroids)
    if np.any(np.bincount(labels, minlength=k) == 0):
        # only reachable with coincident centroids (duplicate points)
        logger.warning("Coincident centroids left a cluster empty; repairing labels")
        labels, d2 = _repair_empty(labels, d2, k)
        d2 = np.sum((matrix - centroids[labels]) ** 2, axis=1)
    return _Run(centroids, labels, float(d2.sum()), n_iter, history)


def kmeans_fit(
    matrix: np.ndarray,
    k: int,
    seed: int,
    n_init: int = 10,
    max_iter: int = 300,
    tol: float = 1e-6,
    *,
    warm_start: np.ndarray | None = None,
    max_workers: int | None = None,
) -> KMeansModel:
    """Best of *n_init* k-means++ / Lloyd runs (lowest inertia, earliest on ties).

    Restart ``r`` draws from ``default_rng((seed, r))`` so a threaded run
    equals the sequential one. *warm_start* centroids, when given, are tried
    as one extra run after the random restarts.
    """
    matrix = _as_points(matrix)
    n = matrix.shape[0]
    if k < 1:
        raise TooFewSamples("k must be >= 1.")
    if n < k:
        raise TooFewSamples(f"{n} samples cannot form {k} clusters.")
    if n_init < 1:
        raise TooFewSamples("n_init must be >= 1.")

    def restart(index: int) -> _Run:
        if index == n_init and warm_start is not None:
            start = np.asarray(warm_start, dtype=float)
        else:
            start = kmeans_plus_plus(matrix, k, np.random.default_rng((seed, index)))
        return _lloyd(matrix, start, max_iter, tol)

    n_runs = n_init + (1 if warm_start is not None else 0)
    workers = max_workers if max_workers is not None else settings.get_max_workers()
    runs = ordered_map(restart, range(n_runs), workers)

    best = 0
    for index, run in enumerate(runs):
        logger.debug("k=%d restart %d inertia %.6g after %d iter", k, index, run.inertia, run.n_iter)
        if run.inertia < runs[best].inertia:
            best = index
    run = runs[best]
    return KMeansModel(
        k=k,
        centroids=run.centroids,
        labels=run.labels,
        inertia=run.inertia,
        n_iter=run.n_iter,
        seed=seed,
        inertia_history=tuple(run.history),
        restart=best,
    )


# ---------------------------------------------------------------------------
# k selection
# ---------------------------------------------------------------------------


def select_elbow(
    k_values: Sequence[int], wcss: Sequence[float]
) -> tuple[int, bool, bool]:
    """Maximum-curvature elbow: ``(selected_k, low_curvature, degenerate)``.

    The selected k maximises ``wcss[k-1] - 2 wcss[k] + wcss[k+1]`` over
    interior k (first on ties). The curvature is low when that maximum is at
    most 5% of the total WCSS drop; a curve without interior points is
    degenerate and selects its first k.
    """
    k_values, values = list(k_values), np.asarray(wcss, dtype=float)
    if not k_values:
        raise TooFewSamples("Empty elbow curve.")
    if len(k_values) < 3:
        return int(k_values[0]), True, True
    second = values[:-2] - 2.0 * values[1:-1] + values[2:]
    peak = int(np.argmax(second))
    drop = values[0] - values[-1]
    low = bool(drop <= 0 or second[peak] <= LOW_CURVATURE_FRACTION * drop)
    return int(k_values[peak + 1]), low, False


def elbow_scan(
    matrix: np.ndarray,
    k_min: int = 1,
    k_max: int = 10,
    seed: int = 0,
    n_init: int = 10,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> ElbowCurve:
    """Fit k-means for every k in ``[k_min, k_max]`` and pick the elbow.

    From the second k on, the previous solution plus its worst-fit point is
    offered as a warm start, so the best-of-restarts WCSS never increases
    with k.
    """
    matrix = _as_points(matrix)
    if k_min < 1 or k_max < k_min:
        raise TooFewSamples(f"Invalid k range [{k_min}, {k_max}].")
    if k_max > matrix.shape[0]:
        raise TooFewSamples(f"k_max={k_max} exceeds {matrix.shape[0]} samples.")

    models: list[KMeansModel] = []
    for k in range(k_min, k_max + 1):
        warm = None
        if models:
            previous = models[-1]
            residual = np.sum((matrix - previous.centroids[previous.labels]) ** 2, axis=1)
            warm = np.vstack([previous.centroids, matrix[int(np.argmax(residual))]])
        models.append(
            kmeans_fit(matrix, k, seed, n_init, max_iter, tol, warm_start=warm)
        )

    k_values = tuple(m.k for m in models)
    wcss = tuple(m.inertia for m in models)
    selected, low, degenerate = select_elbow(k_values, wcss)
    if low and not degenerate:
        logger.warning("Elbow at k=%d has low curvature; review the WCSS curve", selected)
    logger.info("Elbow scan over k=%d..%d selected k=%d", k_min, k_max, selected)
    return ElbowCurve(k_values, wcss, selected, low, degenerate, tuple(models))


def silhouette(matrix: np.ndarray, labels: np.ndarray) -> SilhouetteReport:
    """Exact silhouette from the full pairwise Euclidean distance matrix.

    Members of singleton clusters score 0, as do points with ``a == b == 0``.
    """
    matrix = _as_points(matrix)
    labels = np.asarray(labels)
    if labels.shape[0] != matrix.shape[0]:
        raise DimensionMismatch(matrix.shape[0], labels.shape[0])
    clusters, codes = np.unique(labels, return_inverse=True)
    if clusters.size < 2:
        raise SingleCluster("Silhouette needs at least 2 clusters.")

    distances = squareform(pdist(matrix))
    counts = np.bincount(codes)
    sums = np.column_stack([distances[:, codes == c].sum(axis=1) for c in range(clusters.size)])
    rows = np.arange(matrix.shape[0])
    own = counts[codes]

    with np.errstate(divide="ignore", invalid="ignore"):
        a = sums[rows, codes] / np.maximum(own - 1, 1)
        means = sums / counts[None, :]
    means[rows, codes] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    values = np.where((own > 1) & (denom > 0), (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    return SilhouetteReport(values, float(values.mean()))


def validate_k(matrix: np.ndarray, curve: ElbowCurve) -> SilhouetteValidation:
    """Silhouette mean for each scanned k >= 2; valid when its argmax is the elbow."""
    scores = tuple(
        (model.k, silhouette(matrix, model.labels).mean)
        for model in curve.models
        if model.k >= 2
    )
    best = None
    if scores:
        best = scores[int(np.argmax([s for _, s in scores]))][0]
    validated = best == curve.selected_k
    if not validated:
        logger.warning(
            "Silhouette favours k=%s while the elbow selected k=%d", best, curve.selected_k
        )
    return SilhouetteValidation(scores, best, curve.selected_k, validated)
