"""Evaluation report schema and its CSV / markdown renderings."""

from __future__ import annotations

import io
import json
import logging
from typing import Any, Literal, Sequence

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from tools.texts import NOT_APPLICABLE, bold_markdown, escape_markdown, format_number, markdown_table

logger = logging.getLogger(__name__)

__all__ = [
    "STAT_ROWS",
    "Metrics",
    "FeatureStats",
    "ClusterStats",
    "ClusterEvaluation",
    "ElbowSummary",
    "SilhouetteSummary",
    "FeedbackSummary",
    "Provenance",
    "EvaluationReport",
    "ClusteringSummary",
    "canonical_json",
    "metrics_csv",
    "metrics_detail_csv",
    "cluster_stats_frame",
    "cluster_stats_csv",
    "elbow_csv",
    "silhouette_csv",
    "render_markdown",
    "render_clustering_markdown",
]

STAT_ROWS = ("mean", "std", "min", "25%", "median", "75%", "max")
_STAT_FIELDS = ("mean", "std", "min", "q25", "median", "q75", "max")


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Metrics(_Model):
    rmse: float
    r2: float


class FeatureStats(_Model):
    """Descriptive statistics of one column; ``None`` means not applicable."""

    feature: str
    count: int
    mean: float | None = None
    std: float | None = None
    min: float | None = None
    q25: float | None = None
    median: float | None = None
    q75: float | None = None
    max: float | None = None

    def row(self) -> list[float | None]:
        return [getattr(self, name) for name in _STAT_FIELDS]


class ClusterStats(_Model):
    cluster: int
    size: int
    degenerate: bool = False
    features: list[FeatureStats]

    def feature(self, name: str) -> FeatureStats:
        for stats in self.features:
            if stats.feature == name:
                return stats
        raise KeyError(name)


class ClusterEvaluation(_Model):
    cluster: int
    size_train: int
    size_test: int
    status: Literal["modeled", "insufficient_data", "failed"]
    family: str | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    cv_rmse: float | None = None
    train: Metrics | None = None
    test: Metrics | None = None
    message: str = ""


class ElbowSummary(_Model):
    k_values: list[int]
    wcss: list[float]
    selected_k: int
    low_curvature: bool
    degenerate: bool


class SilhouetteSummary(_Model):
    k: int
    mean: float | None
    scores: dict[str, float] = Field(default_factory=dict)
    best_k: int | None = None
    validated: bool = False


class FeedbackSummary(_Model):
    ranking: list[int]
    characteristics: dict[str, list[str]] = Field(default_factory=dict)
    unmodeled: list[int] = Field(default_factory=list)


class Provenance(_Model):
    config_hash: str
    seed: int
    seeds: dict[str, int] = Field(default_factory=dict)
    generated_at: str = ""


class EvaluationReport(_Model):
    dataset: str
    n_records: int
    n_dropped: int = 0
    n_train: int
    n_test: int
    clustering_features: list[str]
    regression_features: list[str]
    cluster_space: str
    selected_k: int
    k_overridden: bool = False
    elbow: ElbowSummary | None = None
    silhouette: SilhouetteSummary
    pca: dict[str, Any] | None = None
    scaling: dict[str, Any] = Field(default_factory=dict)
    clusters: list[ClusterStats]
    evaluations: list[ClusterEvaluation]
    shared_params: dict[str, Any] | None = None
    global_train: Metrics | None = None
    global_test: Metrics | None = None
    feedback: FeedbackSummary | None = None
    provenance: Provenance

    def evaluation(self, cluster: int) -> ClusterEvaluation:
        return next(e for e in self.evaluations if e.cluster == cluster)


class ClusteringSummary(_Model):
    """Outcome of the clustering stages alone, before any model is fitted."""

    dataset: str
    n_train: int
    n_test: int
    clustering_features: list[str]
    cluster_space: str
    selected_k: int
    k_overridden: bool = False
    elbow: ElbowSummary
    silhouette: SilhouetteSummary
    clusters: list[ClusterStats]


# ---------------------------------------------------------------------------
# Renderers
# ---------------------------------------------------------------------------


def canonical_json(
    report: EvaluationReport | ClusteringSummary, include_timestamp: bool = True
) -> str:
    """Stable JSON: sorted keys, two-space indent, trailing newline."""
    payload = report.model_dump(mode="json")
    if not include_timestamp and "provenance" in payload:
        payload["provenance"].pop("generated_at", None)
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _frame_to_csv(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def _cell(value: float | None) -> str:
    return NOT_APPLICABLE if value is None else repr(float(value))


def metrics_csv(evaluations: Sequence[ClusterEvaluation]) -> str:
    """Per-cluster test metrics with the columns ``cluster,rmse_test,r2_test``."""
    rows = [
        {
            "cluster": e.cluster,
            "rmse_test": _cell(e.test.rmse if e.test else None),
            "r2_test": _cell(e.test.r2 if e.test else None),
        }
        for e in evaluations
    ]
    return _frame_to_csv(pd.DataFrame(rows, columns=["cluster", "rmse_test", "r2_test"]))


def metrics_detail_csv(evaluations: Sequence[ClusterEvaluation]) -> str:
    rows = [
        {
            "cluster": e.cluster,
            "status": e.status,
            "family": e.family or NOT_APPLICABLE,
            "size_train": e.size_train,
            "size_test": e.size_test,
            "cv_rmse": _cell(e.cv_rmse),
            "rmse_train": _cell(e.train.rmse if e.train else None),
            "r2_train": _cell(e.train.r2 if e.train else None),
            "rmse_test": _cell(e.test.rmse if e.test else None),
            "r2_test": _cell(e.test.r2 if e.test else None),
        }
        for e in evaluations
    ]
    return _frame_to_csv(pd.DataFrame(rows))


def cluster_stats_frame(stats: ClusterStats, digits: int | None = None) -> pd.DataFrame:
    """Statistic rows (mean .. max) by feature columns."""
    data: dict[str, list[str]] = {"statistic": list(STAT_ROWS)}
    for feature in stats.features:
        values = feature.row()
        data[feature.feature] = [
            (format_number(v, digits) if digits is not None else _cell(v)) for v in values
        ]
    return pd.DataFrame(data)


def cluster_stats_csv(stats: ClusterStats) -> str:
    return _frame_to_csv(cluster_stats_frame(stats))


def elbow_csv(report: EvaluationReport | ClusteringSummary) -> str:
    elbow = report.elbow
    if elbow is None:
        return "k,wcss\n"
    frame = pd.DataFrame({"k": elbow.k_values, "wcss": [repr(w) for w in elbow.wcss]})
    return _frame_to_csv(frame)


def silhouette_csv(report: EvaluationReport | ClusteringSummary) -> str:
    scores = report.silhouette.scores
    frame = pd.DataFrame(
        {"k": [int(k) for k in scores], "silhouette": [repr(v) for v in scores.values()]}
    )
    return _frame_to_csv(frame)


def _metric_cells(metrics: Metrics | None) -> list[str]:
    if metrics is None:
        return [NOT_APPLICABLE, NOT_APPLICABLE]
    return [format_number(metrics.rmse), format_number(metrics.r2)]


def render_markdown(report: EvaluationReport) -> str:
    """Human-readable report: metric table, one stats table per cluster, ranking."""
    lines = [
        f"# Quality evaluation: {escape_markdown(report.dataset)}",
        "",
        f"- records: {report.n_records} ({report.n_dropped} dropped for nulls)",
        f"- train / test: {report.n_train} / {report.n_test}",
        f"- clusters: {report.selected_k}" + (" (override)" if report.k_overridden else ""),
        f"- silhouette mean: {format_number(report.silhouette.mean)}"
        + ("" if report.silhouette.validated else " (not confirmed by silhouette scan)"),
        f"- seed: {report.provenance.seed}; config hash: `{report.provenance.config_hash[:12]}`",
    ]
    if report.global_train is not None:
        lines.append(
            f"- global train RMSE / R2: {format_number(report.global_train.rmse)} / "
            f"{format_number(report.global_train.r2)}"
        )
    if report.global_test is not None:
        lines.append(
            f"- global test RMSE / R2: {format_number(report.global_test.rmse)} / "
            f"{format_number(report.global_test.r2)}"
        )

    lines += ["", "## Model performance per cluster", ""]
    rows = []
    for e in report.evaluations:
        rows.append(
            [
                str(e.cluster),
                e.family or NOT_APPLICABLE,
                *_metric_cells(e.train),
                *_metric_cells(e.test),
                e.status.replace("_", " "),
            ]
        )
    lines.append(
        markdown_table(
            ["Cluster#", "Model", "RMSE train", "R2 train", "RMSE test", "R2 test", "Status"], rows
        )
    )

    lines += _cluster_sections(report.clusters)

    if report.feedback is not None:
        lines += ["", "## Quality ranking", ""]
        for place, cluster in enumerate(report.feedback.ranking, start=1):
            traits = report.feedback.characteristics.get(str(cluster), [])
            note = "; ".join(traits) if traits else "no dominant characteristics"
            suffix = " (not modeled)" if cluster in report.feedback.unmodeled else ""
            lines.append(f"{place}. cluster {cluster}{suffix}: {escape_markdown(note)}")
    return "\n".join(lines) + "\n"


def _cluster_sections(clusters: Sequence[ClusterStats]) -> list[str]:
    lines: list[str] = []
    for stats in clusters:
        lines += [
            "",
            f"## Cluster {stats.cluster} ({stats.size} records)"
            + (" - single member, std not applicable" if stats.degenerate else ""),
            "",
        ]
        frame = cluster_stats_frame(stats, digits=2)
        lines.append(
            markdown_table(
                ["", *[c for c in frame.columns[1:]]],
                ([bold_markdown(row[0]), *row[1:]] for row in frame.itertuples(index=False)),
            )
        )
    return lines


def render_clustering_markdown(summary: ClusteringSummary) -> str:
    """Elbow, silhouette and per-cluster statistics of a clustering run."""
    elbow, sil = summary.elbow, summary.silhouette
    lines = [
        f"# Quality clusters: {escape_markdown(summary.dataset)}",
        "",
        f"- train / test: {summary.n_train} / {summary.n_test}",
        f"- clustering features: {escape_markdown(', '.join(summary.clustering_features))}"
        f" ({summary.cluster_space} space)",
        f"- clusters: {summary.selected_k}" + (" (override)" if summary.k_overridden else ""),
        f"- elbow: k = {elbow.selected_k}" + (" (low curvature)" if elbow.low_curvature else ""),
        f"- silhouette mean: {format_number(sil.mean)}"
        + ("" if sil.validated else " (not confirmed by silhouette scan)"),
        "",
        "## Elbow and silhouette scan",
        "",
        markdown_table(
            ["k", "WCSS", "silhouette"],
            (
                [str(k), format_number(w), format_number(sil.scores.get(str(k)), 3)]
                for k, w in zip(elbow.k_values, elbow.wcss)
            ),
        ),
    ]
    lines += _cluster_sections(summary.clusters)
    return "\n".join(lines) + "\n"
