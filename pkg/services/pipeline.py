"""End-to-end quality evaluation: scale, reduce, cluster, model per cluster, report."""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd

from core.config import settings
from core.errors import (
    InsufficientClusterData,
    PipelineStageError,
    QualityEvaluationError,
    SchemaMismatch,
)
from core.pipeline_config import ModelConfig, PipelineConfig, ScalingConfig
from repositories.reports import FORMATS, ReportRepository, ReportRepositoryProtocol
from services.cluster import (
    ElbowCurve,
    KMeansModel,
    SilhouetteValidation,
    assign,
    elbow_scan,
    kmeans_fit,
    silhouette,
    validate_k,
)
from services.models import GridSearchResult, MetricPair, evaluate, fit_family, grid_search
from services.reduce import PcaModel, fit_pca
from services.reports import (
    ClusterEvaluation,
    ClusteringSummary,
    ClusterStats,
    ElbowSummary,
    EvaluationReport,
    FeatureStats,
    FeedbackSummary,
    Metrics,
    Provenance,
    SilhouetteSummary,
)
from services.synthetic import generate_tiered_dataset
from services.tabular import (
    FEATURES,
    TARGET,
    QualityDataset,
    ScalingParams,
    apply_scaling,
    drop_nulls,
    feature_matrix,
    fit_scaling,
    load_csv,
    split_indices,
    target_vector,
)
from tools.datetime_utils import report_timestamp
from tools.seeding import derive_seed

logger = logging.getLogger(__name__)

__all__ = [
    "ASSIGNMENT_COLUMNS",
    "STATS_COLUMNS",
    "ClusterOutcome",
    "ClusteredData",
    "PipelineResult",
    "PipelineService",
    "align_assignments",
    "cluster_stats",
    "collect_predictions",
    "evaluate_per_cluster",
    "rank_clusters",
    "run_pipeline",
    "scale_on_train",
]

STATS_COLUMNS = (*FEATURES, "injection_volume", TARGET)
SHARED_INDEX = -1


# ---------------------------------------------------------------------------
# Descriptive statistics
# ---------------------------------------------------------------------------


def _describe(name: str, values: np.ndarray) -> FeatureStats:
    values = values[~np.isnan(values)]
    if values.size == 0:
        return FeatureStats(feature=name, count=0)
    q25, median, q75 = np.quantile(values, [0.25, 0.5, 0.75], method="linear")
    return FeatureStats(
        feature=name,
        count=int(values.size),
        mean=float(values.mean()),
        std=float(values.std(ddof=1)) if values.size > 1 else None,
        min=float(values.min()),
        q25=float(q25),
        median=float(median),
        q75=float(q75),
        max=float(values.max()),
    )


def cluster_stats(
    ds: QualityDataset,
    labels: np.ndarray,
    cluster_id: int,
    columns: Sequence[str] = STATS_COLUMNS,
) -> ClusterStats:
    """mean, sample std, min, quartiles (linear interpolation), max per column.

    Columns without any value in the cluster are reported as not applicable.
    """
    labels = np.asarray(labels)
    members = np.flatnonzero(labels == cluster_id)
    if members.size == 0:
        raise QualityEvaluationError(f"Cluster {cluster_id} has no members.")
    subset = ds.subset(members)
    return ClusterStats(
        cluster=int(cluster_id),
        size=int(members.size),
        degenerate=members.size == 1,
        features=[_describe(name, subset.column(name)) for name in columns],
    )


# ---------------------------------------------------------------------------
# Per-cluster modelling
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True, eq=False)
class ClusterOutcome:
    evaluation: ClusterEvaluation
    searches: dict[str, GridSearchResult] = field(default_factory=dict)
    train_pred: np.ndarray | None = None
    test_pred: np.ndarray | None = None


def _metrics(pair: MetricPair) -> Metrics:
    return Metrics(rmse=pair.rmse, r2=pair.r2)


def _plain(params: dict[str, Any]) -> dict[str, Any]:
    return {k: (v.item() if isinstance(v, np.generic) else v) for k, v in params.items()}


def shared_tuning(
    X: np.ndarray, y: np.ndarray, model: ModelConfig, seed: int
) -> dict[str, GridSearchResult]:
    """One grid search per family on the whole training split."""
    return {
        family: grid_search(family, model.grid_for(family), X, y, model.folds, seed)
        for family in model.families()
    }


def _evaluate_cluster(
    cluster: int,
    X_train: np.ndarray,
    y_train: np.ndarray,
    X_test: np.ndarray,
    y_test: np.ndarray,
    model: ModelConfig,
    seed: int,
    shared: dict[str, GridSearchResult] | None,
) -> ClusterOutcome:
    n_train, n_test = y_train.size, y_test.size
    base = {"cluster": cluster, "size_train": n_train, "size_test": n_test}
    if n_train < model.min_cluster_rows:
        error = InsufficientClusterData(cluster, n_train, model.min_cluster_rows)
        logger.warning("Skipping model for cluster %d: %s", cluster, error)
        return ClusterOutcome(ClusterEvaluation(**base, status="insufficient_data", message=str(error)))

    try:
        if shared is not None:
            family = min(model.families(), key=lambda f: shared[f].best_score)
            params = shared[family].best_params
            cv_rmse = shared[family].best_score
            searches: dict[str, GridSearchResult] = {}
            fitted = fit_family(family, X_train, y_train, params)
        else:
            searches = {
                f: grid_search(f, model.grid_for(f), X_train, y_train, model.folds, seed)
                for f in model.families()
            }
            # lowest CV RMSE; earlier family on ties
            family = min(searches, key=lambda f: searches[f].best_score)
            params = searches[family].best_params
            cv_rmse = searches[family].best_score
            fitted = searches[family].model
    except QualityEvaluationError as exc:
        logger.warning("Model for cluster %d failed: %s", cluster, exc)
        return ClusterOutcome(ClusterEvaluation(**base, status="failed", message=str(exc)))

    train_pred = fitted.predict(X_train)
    test_pred = fitted.predict(X_test) if n_test else np.empty(0)
    evaluation = ClusterEvaluation(
        **base,
        status="modeled",
        family=family,
        params=_plain(params),
        cv_rmse=float(cv_rmse),
        train=_metrics(evaluate(y_train, train_pred)),
        test=_metrics(evaluate(y_test, test_pred)) if n_test else None,
        message="" if n_test else "no test rows in cluster",
    )
    logger.info(
        "Cluster %d: %s %s, test %s",
        cluster,
        family,
        evaluation.params,
        evaluation.test.model_dump() if evaluation.test else "n/a",
    )
    return ClusterOutcome(evaluation, searches, train_pred, test_pred)


async def evaluate_per_cluster(
    X_train: np.ndarray,
    y_train: np.ndarray,
    X_test: np.ndarray,
    y_test: np.ndarray,
    labels_train: np.ndarray,
    labels_test: np.ndarray,
    k: int,
    model: ModelConfig,
    master_seed: int,
    shared: dict[str, GridSearchResult] | None = None,
) -> list[ClusterOutcome]:
    """Tune, fit and score one model per cluster; results ordered by cluster.

    Cluster ``c`` cross-validates with ``derive_seed(master_seed, "cv", c)``.
    At most ``settings.MAX_WORKERS`` clusters are evaluated at once.
    """
    limit = asyncio.Semaphore(settings.get_max_workers())

    async def one(cluster: int) -> ClusterOutcome:
        tr, te = labels_train == cluster, labels_test == cluster
        async with limit:
            return await asyncio.to_thread(
                _evaluate_cluster,
                cluster,
                X_train[tr],
                y_train[tr],
                X_test[te],
                y_test[te],
                model,
                derive_seed(master_seed, "cv", cluster),
                shared,
            )

    return list(await asyncio.gather(*(one(c) for c in range(k))))


# ---------------------------------------------------------------------------
# Feedback
# ---------------------------------------------------------------------------


def rank_clusters(report: EvaluationReport, features: Sequence[str] | None = None) -> FeedbackSummary:
    """Rank modeled clusters by test R2 (descending, lower index on ties).

    Clusters without test metrics follow in index order. A feature is
    characteristic of a cluster when its cluster mean lies more than one
    pooled within-cluster std from the dataset mean; by default every
    clustering or regression feature is examined.
    """
    scored = [e for e in report.evaluations if e.test is not None]
    unscored = sorted(e.cluster for e in report.evaluations if e.test is None)
    ranking = [e.cluster for e in sorted(scored, key=lambda e: (-e.test.r2, e.cluster))] + unscored

    if features is None:
        used = {*report.clustering_features, *report.regression_features}
        features = [f for f in FEATURES if f in used]
    names = list(features)
    characteristics: dict[str, list[str]] = {str(c.cluster): [] for c in report.clusters}
    for name in names:
        rows = [(c.cluster, c.feature(name)) for c in report.clusters]
        rows = [(cid, s) for cid, s in rows if s.mean is not None]
        total = sum(s.count for _, s in rows)
        if total <= len(rows):
            continue
        overall = sum(s.count * s.mean for _, s in rows) / total
        pooled = np.sqrt(sum((s.count - 1) * (s.std or 0.0) ** 2 for _, s in rows) / (total - len(rows)))
        if not pooled > 0:
            continue
        for cid, s in rows:
            if s.mean - overall > pooled:
                characteristics[str(cid)].append(f"{name}: above dataset mean")
            elif overall - s.mean > pooled:
                characteristics[str(cid)].append(f"{name}: below dataset mean")
    return FeedbackSummary(ranking=ranking, characteristics=characteristics, unmodeled=unscored)


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True, eq=False)
class PipelineResult:
    report: EvaluationReport
    data: ClusteredData
    predictions: pd.DataFrame
    outcomes: tuple[ClusterOutcome, ...]
    shared: dict[str, GridSearchResult] | None

    @property
    def feedback(self) -> FeedbackSummary:
        return self.report.feedback

    def cv_tables(self) -> dict[str, pd.DataFrame]:
        """CV score tables keyed by artifact stem."""
        tables: dict[str, pd.DataFrame] = {}
        if self.shared:
            tables["cv_scores_shared"] = pd.concat([s.score_frame() for s in self.shared.values()])
        for outcome in self.outcomes:
            if outcome.searches:
                tables[f"cv_scores_cluster_{outcome.evaluation.cluster}"] = pd.concat(
                    [s.score_frame() for s in outcome.searches.values()]
                )
        return tables


@dataclass(frozen=True, slots=True, eq=False)
class ClusteredData:
    """Everything up to and including cluster assignment."""

    n_loaded: int
    dataset: QualityDataset
    train_idx: np.ndarray
    test_idx: np.ndarray
    clustering_features: tuple[str, ...]
    regression_features: tuple[str, ...]
    regression_matrix: np.ndarray  # scaled, all records
    target: np.ndarray
    scaling: dict[str, Any]
    pca: PcaModel
    coordinates: np.ndarray
    elbow: ElbowCurve
    validation: SilhouetteValidation
    k: int
    kmeans: KMeansModel
    labels_train: np.ndarray
    labels_test: np.ndarray
    silhouette_mean: float | None
    seeds: dict[str, int]

    @property
    def labels(self) -> np.ndarray:
        labels = np.empty(len(self.dataset), dtype=int)
        labels[self.train_idx] = self.labels_train
        labels[self.test_idx] = self.labels_test
        return labels

    def assignments(self) -> pd.DataFrame:
        """Per-record split, cluster label and cluster-space coordinates."""
        split = np.full(len(self.dataset), "train", dtype=object)
        split[self.test_idx] = "test"
        frame = pd.DataFrame(
            {
                "sequence_id": [r.sequence_id for r in self.dataset.records],
                "split": split,
                "cluster": self.labels,
            }
        )
        for j in range(self.coordinates.shape[1]):
            frame[f"coord_{j}"] = self.coordinates[:, j]
        return frame

    def elbow_summary(self) -> ElbowSummary:
        elbow = self.elbow
        return ElbowSummary(
            k_values=list(elbow.k_values),
            wcss=list(elbow.wcss),
            selected_k=elbow.selected_k,
            low_curvature=elbow.low_curvature,
            degenerate=elbow.degenerate,
        )

    def silhouette_summary(self) -> SilhouetteSummary:
        validation = self.validation
        return SilhouetteSummary(
            k=self.k,
            mean=self.silhouette_mean,
            scores={str(k): s for k, s in validation.scores},
            best_k=validation.best_k,
            validated=validation.best_k == self.k,
        )

    def cluster_stats(self) -> list[ClusterStats]:
        labels = self.labels
        return [cluster_stats(self.dataset, labels, c) for c in range(self.k)]


def scale_on_train(
    matrix: np.ndarray, names: Sequence[str], train_idx: np.ndarray, scaling: ScalingConfig
) -> tuple[np.ndarray, ScalingParams]:
    """Fit scaling on the training rows only, then apply it to every row."""
    _, params = fit_scaling(
        matrix[train_idx],
        names,
        standardize_features=scaling.standardize,
        normalize_features=scaling.normalize,
    )
    return apply_scaling(matrix, params), params


ASSIGNMENT_COLUMNS = ("sequence_id", "split", "cluster")


def align_assignments(ds: QualityDataset, assignments: pd.DataFrame) -> tuple[np.ndarray, np.ndarray]:
    """Map a stored assignment table onto *ds*: ``(is_train mask, labels)``."""
    missing = [c for c in ASSIGNMENT_COLUMNS if c not in assignments.columns]
    if missing:
        raise SchemaMismatch(f"assignments lack column(s) {', '.join(missing)}")
    table = assignments.astype({"sequence_id": str}).set_index("sequence_id")
    if table.index.has_duplicates:
        raise SchemaMismatch("assignments repeat a sequence_id")
    ids = [r.sequence_id for r in ds.records]
    unknown = [i for i in ids if i not in table.index]
    if unknown:
        raise SchemaMismatch(
            f"{len(unknown)} record(s) have no cluster assignment (first: {unknown[0]})"
        )
    rows = table.loc[ids]
    split = rows["split"].astype(str).to_numpy()
    if not np.isin(split, ["train", "test"]).all():
        raise SchemaMismatch("assignment split must be 'train' or 'test'")
    return split == "train", rows["cluster"].to_numpy(dtype=int)


class PipelineService:
    """Runs the evaluation stages in order; every stage failure names its stage."""

    def __init__(self, repo: ReportRepositoryProtocol) -> None:
        self._repo = repo

    @staticmethod
    def _tag(name: str, exc: Exception) -> PipelineStageError:
        if not isinstance(exc, (QualityEvaluationError, OSError)):
            logger.exception("Stage %s raised %s", name, type(exc).__name__)
        return PipelineStageError(name, exc)

    @classmethod
    def _stage(cls, name: str, fn, *args, **kwargs):
        logger.info("Stage %s started", name)
        try:
            result = fn(*args, **kwargs)
        except PipelineStageError:
            raise
        except Exception as exc:
            raise cls._tag(name, exc) from exc
        logger.info("Stage %s finished", name)
        return result

    @classmethod
    async def _async_stage(cls, name: str, awaitable):
        logger.info("Stage %s started", name)
        try:
            result = await awaitable
        except PipelineStageError:
            raise
        except Exception as exc:
            raise cls._tag(name, exc) from exc
        logger.info("Stage %s finished", name)
        return result

    # ---------------- Stages ----------------
    @staticmethod
    def load_dataset(config: PipelineConfig) -> QualityDataset:
        source = config.dataset
        if source.synthetic is not None:
            seed = derive_seed(config.seed, "synthetic")
            ds, _ = generate_tiered_dataset(source.synthetic, seed, source.name)
            return ds
        return load_csv(source.path, source.name)

    def prepare(self, config: PipelineConfig) -> ClusteredData:
        """Load, filter, split, scale, reduce and cluster."""
        self._stage("config", config.check_paths)
        seeds = {
            "split": derive_seed(config.seed, "split"),
            "kmeans": derive_seed(config.seed, "kmeans"),
        }
        if config.dataset.synthetic is not None:
            seeds["synthetic"] = derive_seed(config.seed, "synthetic")

        raw = self._stage("load", self.load_dataset, config)
        ds = self._stage("filter", drop_nulls, raw)
        train_idx, test_idx = self._stage(
            "split", split_indices, len(ds), config.split.test_fraction, seeds["split"]
        )

        def matrices():
            Xc, c_names = feature_matrix(ds, config.features.clustering)
            Xr, r_names = feature_matrix(ds, config.features.regression)
            return Xc, c_names, Xr, r_names, target_vector(ds)

        Xc, c_names, Xr, r_names, y = self._stage("features", matrices)

        def scale():
            Zc, c_params = scale_on_train(Xc, c_names, train_idx, config.scaling)
            Zr, r_params = scale_on_train(Xr, r_names, train_idx, config.scaling)
            return Zc, c_params, Zr, r_params

        Zc, c_params, Zr, r_params = self._stage("scale", scale)

        pca = self._stage(
            "pca",
            fit_pca,
            Zc[train_idx],
            config.pca.n_components,
            None if config.pca.n_components else config.pca.variance_threshold,
        )
        coords = pca.transform(Zc) if config.pca.cluster_space == "pca" else Zc

        cc = config.clustering
        train_coords = coords[train_idx]
        k_max = min(cc.k_max, train_coords.shape[0])
        elbow = self._stage(
            "elbow", elbow_scan, train_coords, min(cc.k_min, k_max), k_max,
            seeds["kmeans"], cc.n_init, cc.max_iter, cc.tol,
        )
        validation = self._stage("silhouette", validate_k, train_coords, elbow)
        k = cc.k or elbow.selected_k
        kmeans = elbow.model_for(k) or self._stage(
            "kmeans", kmeans_fit, train_coords, k, seeds["kmeans"], cc.n_init, cc.max_iter, cc.tol
        )
        labels_test = self._stage("assign", assign, kmeans, coords[test_idx])
        sil_mean = (
            self._stage("silhouette", silhouette, train_coords, kmeans.labels).mean if k >= 2 else None
        )
        logger.info("Clustering with k=%d (elbow %d)", k, elbow.selected_k)
        if config.model.share_tuning:
            seeds["cv:-1"] = derive_seed(config.seed, "cv", SHARED_INDEX)
        seeds.update({f"cv:{c}": derive_seed(config.seed, "cv", c) for c in range(k)})

        return ClusteredData(
            n_loaded=len(raw),
            dataset=ds,
            train_idx=train_idx,
            test_idx=test_idx,
            clustering_features=tuple(c_names),
            regression_features=tuple(r_names),
            regression_matrix=Zr,
            target=y,
            scaling={"clustering": c_params.to_dict(), "regression": r_params.to_dict()},
            pca=pca,
            coordinates=coords,
            elbow=elbow,
            validation=validation,
            k=k,
            kmeans=kmeans,
            labels_train=kmeans.labels,
            labels_test=labels_test,
            silhouette_mean=sil_mean,
            seeds=seeds,
        )

    def summarize_clustering(self, config: PipelineConfig, data: ClusteredData) -> ClusteringSummary:
        """Elbow, silhouette and per-cluster statistics of a prepared split."""
        return ClusteringSummary(
            dataset=config.dataset.name,
            n_train=int(data.train_idx.size),
            n_test=int(data.test_idx.size),
            clustering_features=list(data.clustering_features),
            cluster_space=config.pca.cluster_space,
            selected_k=data.k,
            k_overridden=config.clustering.k is not None,
            elbow=data.elbow_summary(),
            silhouette=data.silhouette_summary(),
            clusters=self._stage("stats", data.cluster_stats),
        )

    async def evaluate(
        self, config: PipelineConfig, data: ClusteredData
    ) -> tuple[list[ClusterOutcome], dict[str, GridSearchResult] | None]:
        """Per-cluster tuning and scoring on the prepared split."""
        X_train, y_train = data.regression_matrix[data.train_idx], data.target[data.train_idx]
        X_test, y_test = data.regression_matrix[data.test_idx], data.target[data.test_idx]
        shared = None
        if config.model.share_tuning:
            shared = self._stage(
                "tune", shared_tuning, X_train, y_train, config.model,
                derive_seed(config.seed, "cv", SHARED_INDEX),
            )

        outcomes = await self._async_stage(
            "evaluate",
            evaluate_per_cluster(
                X_train, y_train, X_test, y_test,
                data.labels_train, data.labels_test, data.k,
                config.model, config.seed, shared,
            ),
        )
        return outcomes, shared

    async def evaluate_labels(
        self, config: PipelineConfig, assignments: pd.DataFrame
    ) -> list[ClusterOutcome]:
        """Per-cluster models for a stored split and cluster assignment."""
        self._stage("config", config.check_paths)
        ds = self._stage("filter", drop_nulls, self._stage("load", self.load_dataset, config))
        is_train, labels = self._stage("assign", align_assignments, ds, assignments)
        train_idx, test_idx = np.flatnonzero(is_train), np.flatnonzero(~is_train)

        def regression_inputs():
            X, names = feature_matrix(ds, config.features.regression)
            Z, _ = scale_on_train(X, names, train_idx, config.scaling)
            return Z, target_vector(ds)

        Z, y = self._stage("scale", regression_inputs)
        k = int(labels.max()) + 1
        shared = None
        if config.model.share_tuning:
            shared = self._stage(
                "tune", shared_tuning, Z[train_idx], y[train_idx], config.model,
                derive_seed(config.seed, "cv", SHARED_INDEX),
            )
        return await self._async_stage(
            "evaluate",
            evaluate_per_cluster(
                Z[train_idx], y[train_idx], Z[test_idx], y[test_idx],
                labels[train_idx], labels[test_idx], k,
                config.model, config.seed, shared,
            ),
        )

    async def run(self, config: PipelineConfig) -> PipelineResult:
        data = self.prepare(config)
        outcomes, shared = await self.evaluate(config, data)
        ds = data.dataset
        stats = self._stage("stats", data.cluster_stats)
        predictions, global_train, global_test = collect_predictions(data, outcomes)

        report = EvaluationReport(
            dataset=config.dataset.name,
            n_records=len(ds),
            n_dropped=data.n_loaded - len(ds),
            n_train=int(data.train_idx.size),
            n_test=int(data.test_idx.size),
            clustering_features=list(data.clustering_features),
            regression_features=list(data.regression_features),
            cluster_space=config.pca.cluster_space,
            selected_k=data.k,
            k_overridden=config.clustering.k is not None,
            elbow=data.elbow_summary(),
            silhouette=data.silhouette_summary(),
            pca=data.pca.to_dict(),
            scaling=data.scaling,
            clusters=stats,
            evaluations=[o.evaluation for o in outcomes],
            shared_params=(
                {f: _plain(s.best_params) for f, s in shared.items()} if shared else None
            ),
            global_train=global_train,
            global_test=global_test,
            provenance=Provenance(
                config_hash=config.config_hash(),
                seed=config.seed,
                seeds=data.seeds,
                generated_at=report_timestamp(),
            ),
        )
        report = report.model_copy(update={"feedback": rank_clusters(report)})
        logger.info("Quality ranking: %s", report.feedback.ranking)
        return PipelineResult(report, data, predictions, tuple(outcomes), shared)

    async def run_and_emit(
        self, config: PipelineConfig, formats: Iterable[str] = FORMATS
    ) -> tuple[PipelineResult, list[Path]]:
        """Run the pipeline and write the report plus side tables."""
        result = await self.run(config)
        tables = {
            "assignments": result.data.assignments(),
            "predictions": result.predictions,
            **result.cv_tables(),
        }
        paths = self._stage(
            "report", self._repo.emit_report, result.report, config.output_dir, formats, tables
        )
        return result, paths


def collect_predictions(
    data: ClusteredData, outcomes: Sequence[ClusterOutcome]
) -> tuple[pd.DataFrame, Metrics | None, Metrics | None]:
    """Actual vs predicted per record; global metrics over modeled rows."""
    n = len(data.dataset)
    predicted = np.full(n, np.nan)
    for outcome in outcomes:
        cluster = outcome.evaluation.cluster
        if outcome.train_pred is not None:
            predicted[data.train_idx[data.labels_train == cluster]] = outcome.train_pred
        if outcome.test_pred is not None:
            predicted[data.test_idx[data.labels_test == cluster]] = outcome.test_pred

    split = np.full(n, "train", dtype=object)
    split[data.test_idx] = "test"
    frame = pd.DataFrame(
        {
            "sequence_id": [r.sequence_id for r in data.dataset.records],
            "split": split,
            "cluster": data.labels,
            "actual": data.target,
            "predicted": predicted,
        }
    )

    def global_metrics(idx: np.ndarray) -> Metrics | None:
        rows = idx[~np.isnan(predicted[idx])]
        return _metrics(evaluate(data.target[rows], predicted[rows])) if rows.size else None

    return frame, global_metrics(data.train_idx), global_metrics(data.test_idx)


async def run_pipeline(
    config: PipelineConfig, repo: ReportRepositoryProtocol | None = None
) -> PipelineResult:
    """Run every stage for *config* without writing any artifacts."""
    return await PipelineService(repo or ReportRepository()).run(config)
