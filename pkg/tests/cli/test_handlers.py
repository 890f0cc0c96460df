import contextlib
import io
import json
import tempfile
from pathlib import Path
from unittest import IsolatedAsyncioTestCase

import pandas as pd

from cli.handlers import clustering, evaluation, signals
from cli.parser import build_parser
from core.errors import ConfigError, PipelineStageError
from services.tabular import load_csv
from tests.factories import SMALL_CONFIG


class HandlerCase(IsolatedAsyncioTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)
        self.config = self.dir / "small.toml"
        self.config.write_text(SMALL_CONFIG, encoding="utf-8")
        self.out = self.dir / "out"

    def tearDown(self):
        self._tmp.cleanup()

    def args(self, *argv, config=True):
        prefix = ["--config", str(self.config)] if config else []
        return build_parser().parse_args([*prefix, "--out", str(self.out), *argv])

    async def call(self, handler, *argv, config=True):
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            code = await handler(self.args(*argv, config=config))
        return code, stdout.getvalue()


class TestSignalHandlers(HandlerCase):
    async def test_synth_writes_traces_and_table(self):
        code, text = await self.call(signals.synth, "synth")
        self.assertEqual(code, 0)
        self.assertTrue((self.out / "chromatograms" / "r1.csv").is_file())
        self.assertTrue((self.out / "chromatograms" / "r2.csv").is_file())
        ds = load_csv(self.out / "tiers.csv")
        self.assertEqual(len(ds), 120)
        tiers = pd.read_csv(self.out / "tiers_tiers.csv")
        self.assertEqual(tiers["tier"].value_counts().to_dict(), {"A": 40, "B": 40, "C": 40})
        self.assertIn("🧪 Chromatogram r1 (1201 samples)", text)
        self.assertIn("📄 Synthetic dataset tiers: 120 records in 3 tiers", text)

    async def test_synth_is_seeded(self):
        await self.call(signals.synth, "synth")
        first = (self.out / "tiers.csv").read_text(encoding="utf-8")
        await self.call(signals.synth, "synth")
        self.assertEqual((self.out / "tiers.csv").read_text(encoding="utf-8"), first)

    async def test_peaks_then_build_table(self):
        await self.call(signals.synth, "synth")
        traces = [str(self.out / "chromatograms" / f"{i}.csv") for i in ("r1", "r2")]
        code, text = await self.call(signals.peaks, "peaks", *traces)
        self.assertEqual(code, 0)
        self.assertIn("📈 r1: tR 5.0000 min", text)
        peaks = pd.read_csv(self.out / "peaks.csv")
        self.assertEqual(peaks["chromatogram_id"].tolist(), ["r1", "r2"])

        sheet = self.dir / "sheet.csv"
        sheet.write_text("sequence_id,run1_id,run2_id,length,sulfur_count\nAAA,r1,r2,20,19\n", encoding="utf-8")
        code, text = await self.call(
            signals.build_table, "build-table", "--metrics", str(self.out / "peaks.csv"), "--sheet", str(sheet), "--name", "pairs"
        )
        self.assertEqual(code, 0)
        record = load_csv(self.out / "pairs.csv").records[0]
        self.assertAlmostEqual(record.delta_tr, -0.05, delta=0.02)
        self.assertGreater(record.snr, 100.0)
        self.assertIn("1 records (0 with nulls)", text)

    async def test_peaks_needs_a_window(self):
        with self.assertRaises(ConfigError):
            await self.call(signals.peaks, "peaks", "a.csv", config=False)

    async def test_synth_needs_config(self):
        with self.assertRaises(ConfigError):
            await self.call(signals.synth, "synth", config=False)


class TestPipelineHandlers(HandlerCase):
    async def test_cluster_evaluate_run_report(self):
        await self.call(signals.synth, "synth")
        table = str(self.out / "tiers.csv")

        code, text = await self.call(clustering.cluster, "cluster", "--table", table)
        self.assertEqual(code, 0)
        self.assertIn("🔎 k=3", text)
        assignments = pd.read_csv(self.out / "assignments.csv")
        self.assertEqual(list(assignments.columns[:3]), ["sequence_id", "split", "cluster"])
        self.assertEqual(len(assignments), 120)
        for name in ("elbow.csv", "silhouette.csv", "cluster_0_stats.csv", "cluster_2_stats.csv"):
            self.assertTrue((self.out / name).is_file(), name)
        self.assertTrue((self.out / "clusters.json").is_file())
        self.assertTrue((self.out / "clusters.md").is_file())

        code, text = await self.call(
            evaluation.evaluate, "evaluate", "--labels", str(self.out / "assignments.csv"), "--table", table
        )
        self.assertEqual(code, 0)
        metrics = pd.read_csv(self.out / "metrics.csv", float_precision="round_trip")
        self.assertEqual(list(metrics.columns), ["cluster", "rmse_test", "r2_test"])
        self.assertEqual(metrics["cluster"].tolist(), [0, 1, 2])
        self.assertTrue((self.out / "cv_scores_cluster_0.csv").is_file())

        code, text = await self.call(evaluation.run, "--format", "json", "run", "--table", table)
        self.assertEqual(code, 0)
        self.assertIn("🏁 Quality ranking:", text)
        report = json.loads((self.out / "report.json").read_text(encoding="utf-8"))
        self.assertEqual(report["selected_k"], 3)
        self.assertEqual(report["dataset"], "tiers")
        # stored labels and the full run agree on the per-cluster scores
        self.assertEqual(
            [e["test"]["r2"] for e in report["evaluations"]],
            [float(v) for v in metrics["r2_test"]],
        )
        self.assertTrue((self.out / "predictions.csv").is_file())

        rendered = self.dir / "rendered"
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            code = await evaluation.report(
                build_parser().parse_args(["--out", str(rendered), "--format", "md", "report", str(self.out)])
            )
        self.assertEqual(code, 0)
        self.assertTrue((rendered / "report.md").read_text(encoding="utf-8").startswith("# Quality evaluation: tiers"))

    async def test_cluster_honours_format(self):
        await self.call(signals.synth, "synth")
        table = str(self.out / "tiers.csv")
        code, text = await self.call(clustering.cluster, "--format", "md", "cluster", "--table", table)
        self.assertEqual(code, 0)
        self.assertIn("✅ 2 file(s) written", text)
        self.assertTrue((self.out / "clusters.md").read_text(encoding="utf-8").startswith("# Quality clusters: tiers"))
        self.assertTrue((self.out / "assignments.csv").is_file())
        for name in ("clusters.json", "elbow.csv", "silhouette.csv", "cluster_0_stats.csv"):
            self.assertFalse((self.out / name).exists(), name)

    async def test_evaluate_missing_labels(self):
        with self.assertRaises(ConfigError):
            await self.call(evaluation.evaluate, "evaluate", "--labels", str(self.dir / "none.csv"))

    async def test_run_with_missing_table(self):
        with self.assertRaises(PipelineStageError) as ctx:
            await self.call(evaluation.run, "run", "--table", str(self.dir / "none.csv"))
        self.assertEqual(ctx.exception.stage, "config")
