"""Hand-built reports and configs shared by the service, repository and CLI tests."""

from services.reports import (
    ClusterEvaluation,
    ClusterStats,
    ClusteringSummary,
    ElbowSummary,
    EvaluationReport,
    FeatureStats,
    FeedbackSummary,
    Metrics,
    Provenance,
    SilhouetteSummary,
)


def feature_stats(name: str, base: float) -> FeatureStats:
    return FeatureStats(
        feature=name,
        count=4,
        mean=base,
        std=1.0,
        min=base - 2,
        q25=base - 1,
        median=base,
        q75=base + 1,
        max=base + 2,
    )


def sample_report() -> EvaluationReport:
    clusters = [
        ClusterStats(cluster=0, size=120, features=[feature_stats("snr", 500.0), feature_stats("delta_tr", 0.05)]),
        ClusterStats(cluster=1, size=1, degenerate=True, features=[feature_stats("snr", 90.0), feature_stats("delta_tr", 1.1)]),
    ]
    evaluations = [
        ClusterEvaluation(
            cluster=0,
            size_train=96,
            size_test=24,
            status="modeled",
            family="gb",
            params={"max_depth": 3},
            cv_rmse=0.12,
            train=Metrics(rmse=0.05, r2=0.99),
            test=Metrics(rmse=0.1, r2=0.97),
        ),
        ClusterEvaluation(
            cluster=1,
            size_train=1,
            size_test=0,
            status="insufficient_data",
            message="Cluster 1 has 1 training rows, 10 required.",
        ),
    ]
    return EvaluationReport(
        dataset="G|1",
        n_records=121,
        n_dropped=5,
        n_train=97,
        n_test=24,
        clustering_features=["snr", "delta_tr"],
        regression_features=["snr", "delta_tr"],
        cluster_space="pca",
        selected_k=2,
        elbow=ElbowSummary(k_values=[1, 2, 3], wcss=[10.0, 2.5, 2.0], selected_k=2, low_curvature=False, degenerate=False),
        silhouette=SilhouetteSummary(k=2, mean=0.71, scores={"2": 0.71, "3": 0.4}, best_k=2, validated=True),
        clusters=clusters,
        evaluations=evaluations,
        global_train=Metrics(rmse=0.05, r2=0.99),
        global_test=Metrics(rmse=0.1, r2=0.97),
        feedback=FeedbackSummary(
            ranking=[0, 1],
            characteristics={"0": ["snr: above dataset mean", "delta_tr: below dataset mean"]},
            unmodeled=[1],
        ),
        provenance=Provenance(config_hash="ab" * 32, seed=7, seeds={"split": 11}, generated_at="2024-01-01T00:00:00 UTC"),
    )


def sample_clustering() -> ClusteringSummary:
    report = sample_report()
    return ClusteringSummary(
        dataset=report.dataset,
        n_train=report.n_train,
        n_test=report.n_test,
        clustering_features=report.clustering_features,
        cluster_space=report.cluster_space,
        selected_k=report.selected_k,
        elbow=report.elbow,
        silhouette=report.silhouette,
        clusters=report.clusters,
    )


# Small pipeline config: three 40-row tiers plus two replicate chromatograms
SMALL_CONFIG = """
seed = 3

[dataset]
name = "tiers"

[dataset.synthetic]

[[dataset.synthetic.tiers]]
name = "A"
rows = 40
snr = [600.0, 100.0]
skewness = [1.1, 0.05]
delta_tr = [0.05, 0.01]
peak_area = [1500.0, 150.0]
target_noise = 0.05

[[dataset.synthetic.tiers]]
name = "B"
rows = 40
snr = [200.0, 50.0]
skewness = [1.5, 0.2]
delta_tr = [0.6, 0.05]
peak_area = [9000.0, 400.0]
target_noise = 0.3

[[dataset.synthetic.tiers]]
name = "C"
rows = 40
snr = [80.0, 30.0]
skewness = [1.7, 0.4]
delta_tr = [1.15, 0.08]
peak_area = [1500.0, 150.0]
target_noise = 0.8

[features]
clustering = ["delta_tr", "peak_area"]

[pca]
n_components = 2

[clustering]
k_max = 5
n_init = 2

[model]
folds = 3

[model.gb_grid]
max_depth = [2]
n_estimators = [20]

[peaks]
search_window = [200.0, 400.0]

[[chromatograms]]
id = "r1"
duration = 600.0
sample_rate = 2.0
baseline_offset = 5.0
noise_sigma = 0.05

[[chromatograms.peaks]]
apex_time = 300.0
amplitude = 100.0
sigma = 4.0
tau = 2.0

[[chromatograms]]
id = "r2"
duration = 600.0
sample_rate = 2.0
baseline_offset = 5.0
noise_sigma = 0.05

[[chromatograms.peaks]]
apex_time = 303.0
amplitude = 100.0
sigma = 4.0
tau = 2.0
"""
