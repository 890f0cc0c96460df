import io
import json
from unittest import TestCase

import pandas as pd

from services.reports import (
    STAT_ROWS,
    EvaluationReport,
    canonical_json,
    cluster_stats_csv,
    elbow_csv,
    metrics_csv,
    metrics_detail_csv,
    render_clustering_markdown,
    render_markdown,
    silhouette_csv,
)
from tests.factories import sample_clustering, sample_report


class TestCsvRenderings(TestCase):
    def setUp(self):
        self.report = sample_report()

    def test_metrics_csv(self):
        frame = pd.read_csv(io.StringIO(metrics_csv(self.report.evaluations)), dtype=str, keep_default_na=False)
        self.assertEqual(list(frame.columns), ["cluster", "rmse_test", "r2_test"])
        self.assertEqual(frame.iloc[0].tolist(), ["0", "0.1", "0.97"])
        self.assertEqual(frame.iloc[1].tolist(), ["1", "-", "-"])

    def test_metrics_detail_csv(self):
        frame = pd.read_csv(io.StringIO(metrics_detail_csv(self.report.evaluations)), dtype=str, keep_default_na=False)
        self.assertEqual(frame["status"].tolist(), ["modeled", "insufficient_data"])
        self.assertEqual(frame["family"].tolist(), ["gb", "-"])
        self.assertEqual(frame["cv_rmse"].tolist(), ["0.12", "-"])

    def test_cluster_stats_csv(self):
        frame = pd.read_csv(io.StringIO(cluster_stats_csv(self.report.clusters[0])), dtype=str)
        self.assertEqual(frame["statistic"].tolist(), list(STAT_ROWS))
        self.assertEqual(list(frame.columns), ["statistic", "snr", "delta_tr"])
        self.assertEqual(float(frame.loc[4, "snr"]), 500.0)

    def test_elbow_and_silhouette(self):
        self.assertEqual(elbow_csv(self.report), "k,wcss\n1,10.0\n2,2.5\n3,2.0\n")
        self.assertEqual(silhouette_csv(self.report), "k,silhouette\n2,0.71\n3,0.4\n")
        no_elbow = self.report.model_copy(update={"elbow": None})
        self.assertEqual(elbow_csv(no_elbow), "k,wcss\n")


class TestJson(TestCase):
    def test_round_trip(self):
        report = sample_report()
        restored = EvaluationReport.model_validate_json(canonical_json(report))
        self.assertEqual(restored, report)

    def test_canonical_form(self):
        text = canonical_json(sample_report())
        self.assertTrue(text.endswith("}\n"))
        payload = json.loads(text)
        self.assertEqual(list(payload), sorted(payload))
        self.assertIn("generated_at", payload["provenance"])

    def test_without_timestamp_is_stable(self):
        a = sample_report()
        b = a.model_copy(update={"provenance": a.provenance.model_copy(update={"generated_at": "later"})})
        self.assertEqual(canonical_json(a, include_timestamp=False), canonical_json(b, include_timestamp=False))
        self.assertNotEqual(canonical_json(a), canonical_json(b))


class TestMarkdown(TestCase):
    def setUp(self):
        self.text = render_markdown(sample_report())

    def test_header_and_escaping(self):
        self.assertTrue(self.text.startswith(r"# Quality evaluation: G\|1"))
        self.assertIn("- records: 121 (5 dropped for nulls)", self.text)
        self.assertIn("- global test RMSE / R2: 0.10 / 0.97", self.text)

    def test_performance_table(self):
        self.assertIn("| Cluster# | Model | RMSE train | R2 train | RMSE test | R2 test | Status |", self.text)
        self.assertIn("| 0 | gb | 0.05 | 0.99 | 0.10 | 0.97 | modeled |", self.text)
        self.assertIn("| 1 | - | - | - | - | - | insufficient data |", self.text)

    def test_cluster_sections(self):
        self.assertIn("## Cluster 0 (120 records)", self.text)
        self.assertIn("## Cluster 1 (1 records) - single member, std not applicable", self.text)
        self.assertIn("| **mean** | 500.00 | 0.05 |", self.text)
        self.assertIn("| **25%** | 499.00 | -0.95 |", self.text)

    def test_ranking(self):
        self.assertIn("1. cluster 0: snr: above dataset mean; delta\\_tr: below dataset mean", self.text)
        self.assertIn("2. cluster 1 (not modeled): no dominant characteristics", self.text)


class TestClusteringMarkdown(TestCase):
    def setUp(self):
        self.summary = sample_clustering()
        self.text = render_clustering_markdown(self.summary)

    def test_header(self):
        self.assertTrue(self.text.startswith(r"# Quality clusters: G\|1"))
        self.assertIn(r"- clustering features: snr, delta\_tr (pca space)", self.text)
        self.assertIn("- elbow: k = 2\n", self.text)

    def test_scan_table_joins_elbow_and_silhouette(self):
        self.assertIn("| k | WCSS | silhouette |", self.text)
        self.assertIn("| 1 | 10.00 | - |", self.text)
        self.assertIn("| 2 | 2.50 | 0.710 |", self.text)
        self.assertIn("| 3 | 2.00 | 0.400 |", self.text)

    def test_cluster_sections_match_the_full_report(self):
        self.assertIn("## Cluster 1 (1 records) - single member, std not applicable", self.text)
        self.assertIn("| **mean** | 500.00 | 0.05 |", self.text)

    def test_json_has_no_provenance(self):
        payload = json.loads(canonical_json(self.summary, include_timestamp=False))
        self.assertEqual(payload["selected_k"], 2)
        self.assertNotIn("provenance", payload)
