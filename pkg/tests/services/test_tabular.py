import tempfile
from pathlib import Path
from unittest import TestCase

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from core.errors import (
    DegenerateRange,
    EmptyDataset,
    MissingFeature,
    ParseError,
    QualityEvaluationError,
    SchemaMismatch,
    ZeroVarianceFeature,
)
from services.signal import PeakMetrics
from services.tabular import (
    COLUMNS,
    FEATURES,
    QualityDataset,
    QualityRecord,
    apply_scaling,
    build_quality_table,
    drop_nulls,
    feature_matrix,
    fit_scaling,
    load_csv,
    load_sample_sheet,
    normalize,
    save_csv,
    split_indices,
    split_train_test,
    standardize,
    target_vector,
)

HEADER = ",".join(COLUMNS)


def record(i, **overrides):
    values = dict(
        sequence_id=f"s{i}",
        delta_tr=0.01 * i,
        snr=100.0 + i,
        skewness=1.0 + 0.01 * i,
        peak_area=1000.0 + 10 * i,
        length=16 + i % 4,
        sulfur_count=i % 10,
        injection_volume=None,
        retention_time=8.0 + 0.1 * i,
    )
    values.update(overrides)
    return QualityRecord(**values)


def dataset(n, name="ds"):
    return QualityDataset(name, tuple(record(i) for i in range(n)))


class TestLoadCsv(TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, text, name="table.csv"):
        path = self.dir / name
        path.write_text(text, encoding="utf-8")
        return path

    def test_well_formed(self):
        path = self.write(
            HEADER
            + "\n"
            + "a,-0.01,120.5,1.1,1500,20,19,5,8.01\n"
            + "b,0.02,80,1.4,900,18,0,-,7.5\n"
            + "c,0.0,300,0.9,2100,16,8,,6.9\n"
        )
        ds = load_csv(path)
        self.assertEqual(len(ds), 3)
        self.assertEqual(ds.name, "table")
        self.assertEqual([r.sequence_id for r in ds.records], ["a", "b", "c"])
        first = ds.records[0]
        self.assertEqual(first.delta_tr, -0.01)
        self.assertEqual(first.length, 20)
        self.assertIsInstance(first.length, int)
        self.assertEqual(first.injection_volume, 5.0)
        self.assertIsNone(ds.records[1].injection_volume)
        self.assertIsNone(ds.records[2].injection_volume)

    def test_null_marker(self):
        path = self.write(
            HEADER + "\n" + "a,0.01,120,1.1,1500,20,19,,8\n" + "b,NA,80,1.4,900,18,3,,7.5\n"
        )
        ds = load_csv(path)
        self.assertIsNone(ds.records[1].delta_tr)
        self.assertTrue(ds.records[1].has_nulls())
        self.assertFalse(ds.records[0].has_nulls())

    def test_missing_column(self):
        header = ",".join(c for c in COLUMNS if c != "snr")
        path = self.write(header + "\n" + "a,0.01,1.1,1500,20,19,,8\n")
        with self.assertRaises(SchemaMismatch):
            load_csv(path)

    def test_injection_volume_optional_and_extra_ignored(self):
        header = ",".join(c for c in COLUMNS if c != "injection_volume") + ",operator"
        path = self.write(header + "\n" + "a,0.01,120,1.1,1500,20,19,8,jo\n")
        with self.assertLogs("services.tabular", level="WARNING"):
            ds = load_csv(path, name="G1")
        self.assertEqual(ds.name, "G1")
        self.assertIsNone(ds.records[0].injection_volume)

    def test_column_order_does_not_matter(self):
        columns = list(reversed(COLUMNS))
        row = dict(zip(COLUMNS, ["a", "0.01", "120", "1.1", "1500", "20", "19", "", "8"]))
        path = self.write(",".join(columns) + "\n" + ",".join(row[c] for c in columns) + "\n")
        matrix, names = feature_matrix(load_csv(path), "clustering")
        self.assertEqual(names, FEATURES)
        np.testing.assert_array_equal(matrix, [[0.01, 120.0, 1.1, 1500.0, 20.0, 19.0]])

    def test_parse_error_reports_row_and_column(self):
        path = self.write(
            HEADER + "\n" + "a,0.01,120,1.1,1500,20,19,,8\n" + "b,0.01,abc,1.1,1500,20,19,,8\n"
        )
        with self.assertRaises(ParseError) as ctx:
            load_csv(path)
        self.assertEqual(ctx.exception.row, 2)
        self.assertEqual(ctx.exception.column, "snr")

    def test_invariant_violations_are_parse_errors(self):
        for row, column in (
            ("a,0.01,-5,1.1,1500,20,19,,8", "snr"),
            ("a,0.01,5,1.1,1500,20,20,,8", "sulfur_count"),
            ("a,0.01,5,1.1,1500,20.5,3,,8", "length"),
            ("a,0.01,5,1.1,1500,20,3,,0", "retention_time"),
        ):
            path = self.write(HEADER + "\n" + row + "\n")
            with self.assertRaises(ParseError) as ctx:
                load_csv(path)
            self.assertEqual(ctx.exception.column, column)

    def test_save_then_load(self):
        ds = QualityDataset(
            "x",
            (
                record(1, delta_tr=0.25, skewness=1.5, retention_time=8.5),
                record(2, delta_tr=-0.5, snr=None, skewness=1.25, injection_volume=3.5, retention_time=9.0),
            ),
        )
        path = save_csv(ds, self.dir / "out" / "x.csv")
        loaded = load_csv(path)
        self.assertEqual(loaded.records, ds.records)


class TestRecords(TestCase):
    def test_record_invariants(self):
        with self.assertRaises(QualityEvaluationError):
            record(1, skewness=0.0)
        with self.assertRaises(QualityEvaluationError):
            record(1, length=0)
        with self.assertRaises(QualityEvaluationError):
            record(1, length=5, sulfur_count=5)
        self.assertEqual(record(1, length=5, sulfur_count=4).sulfur_count, 4)

    def test_column_uses_nan_for_nulls(self):
        ds = QualityDataset("x", (record(1), record(2, snr=None)))
        column = ds.column("snr")
        self.assertEqual(column[0], 101.0)
        self.assertTrue(np.isnan(column[1]))


class TestDropNulls(TestCase):
    def test_no_nulls_is_identity(self):
        ds = dataset(5)
        self.assertEqual(drop_nulls(ds), ds)

    def test_g1_shape(self):
        records = [record(i) for i in range(870)]
        for i in (3, 100, 200, 500, 869):
            records[i] = record(i, peak_area=None)
        filtered = drop_nulls(QualityDataset("G1", tuple(records)))
        self.assertEqual(len(filtered), 865)
        self.assertEqual(drop_nulls(filtered), filtered)

    def test_injection_volume_nulls_are_kept(self):
        ds = QualityDataset("x", (record(1, injection_volume=None), record(2, injection_volume=2.0)))
        self.assertEqual(len(drop_nulls(ds)), 2)

    def test_all_null(self):
        ds = QualityDataset("x", (record(1, snr=None), record(2, retention_time=None)))
        with self.assertRaises(EmptyDataset):
            drop_nulls(ds)


class TestScaling(TestCase):
    def test_standardize_analytic(self):
        scaled, params = standardize(np.array([[1.0], [2.0], [3.0]]))
        np.testing.assert_allclose(scaled[:, 0], [-1.224744871, 0.0, 1.224744871], atol=1e-9)
        self.assertAlmostEqual(params.std[0], np.sqrt(2.0 / 3.0))

    def test_standardize_moments_and_idempotence(self):
        rng = np.random.default_rng(0)
        matrix = rng.normal(5.0, 3.0, size=(200, 4))
        scaled, _ = standardize(matrix)
        np.testing.assert_allclose(scaled.mean(axis=0), 0.0, atol=1e-9)
        np.testing.assert_allclose(scaled.var(axis=0), 1.0, atol=1e-9)
        again, _ = standardize(scaled)
        np.testing.assert_allclose(again, scaled, atol=1e-9)

    def test_zero_variance_names_column(self):
        matrix = np.column_stack([np.arange(5.0), np.full(5, 2.0)])
        with self.assertRaises(ZeroVarianceFeature) as ctx:
            standardize(matrix, columns=["a", "b"])
        self.assertEqual(ctx.exception.column, "b")

    def test_normalize(self):
        scaled, params = normalize(np.array([[0.0], [5.0], [10.0]]))
        np.testing.assert_allclose(scaled[:, 0], [0.0, 0.5, 1.0])
        with self.assertLogs("services.tabular", level="WARNING"):
            clamped, _ = normalize(np.array([[12.0], [-1.0], [2.5]]), params)
        np.testing.assert_allclose(clamped[:, 0], [1.0, 0.0, 0.25])

    def test_degenerate_range(self):
        with self.assertRaises(DegenerateRange) as ctx:
            normalize(np.full((4, 1), 3.0), columns=["snr"])
        self.assertEqual(ctx.exception.column, "snr")

    def test_apply_reproduces_fit_exactly(self):
        rng = np.random.default_rng(1)
        matrix = rng.normal(size=(50, 3)) * [1.0, 10.0, 100.0]
        fitted, params = fit_scaling(matrix, ["a", "b", "c"])
        np.testing.assert_array_equal(apply_scaling(matrix, params), fitted)
        self.assertEqual(params.columns, ("a", "b", "c"))
        self.assertEqual(len(params.fitted_on), 16)

    def test_apply_checks_width(self):
        _, params = fit_scaling(np.arange(12.0).reshape(4, 3) ** 2)
        with self.assertRaises(MissingFeature):
            apply_scaling(np.ones((2, 2)), params)

    def test_optional_steps(self):
        matrix = np.array([[1.0, 4.0], [3.0, 8.0], [5.0, 6.0]])
        only_minmax, params = fit_scaling(matrix, standardize_features=False)
        self.assertIsNone(params.standard)
        np.testing.assert_allclose(only_minmax, [[0.0, 0.0], [0.5, 1.0], [1.0, 0.5]])
        untouched, params = fit_scaling(matrix, standardize_features=False, normalize_features=False)
        np.testing.assert_array_equal(untouched, matrix)
        self.assertIsNone(params.minmax)

    @settings(max_examples=50, deadline=None)
    @given(
        arrays(np.float64, (12, 2), elements=st.floats(-1e3, 1e3)),
        st.floats(0.1, 100.0),
        st.floats(-100.0, 100.0),
    )
    def test_standardized_output_invariant_to_affine_input(self, matrix, scale, shift):
        if np.any(matrix.std(axis=0) < 1.0):
            return
        base, _ = standardize(matrix)
        moved, _ = standardize(matrix * scale + shift)
        np.testing.assert_allclose(moved, base, atol=1e-6)


class TestSplit(TestCase):
    def test_sizes_and_disjoint(self):
        train, test = split_indices(10, 0.2, seed=3)
        self.assertEqual((train.size, test.size), (8, 2))
        self.assertFalse(set(train) & set(test))
        self.assertEqual(sorted([*train, *test]), list(range(10)))

    def test_deterministic(self):
        a = split_indices(100, 0.3, seed=9)
        b = split_indices(100, 0.3, seed=9)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])

    def test_g1_test_rows(self):
        _, test = split_indices(865, 0.2, seed=0)
        self.assertEqual(test.size, 173)

    def test_invalid_fraction(self):
        with self.assertRaises(QualityEvaluationError):
            split_indices(10, 1.0, seed=0)

    def test_split_datasets_partition_records(self):
        ds = dataset(25)
        train, test = split_train_test(ds, 0.2, seed=5)
        self.assertEqual(len(train) + len(test), 25)
        ids = {r.sequence_id for r in train.records}
        self.assertFalse(ids & {r.sequence_id for r in test.records})


class TestFeatureMatrix(TestCase):
    def test_shapes_and_order(self):
        ds = dataset(865)
        matrix, names = feature_matrix(ds, "regression")
        self.assertEqual(matrix.shape, (865, 6))
        self.assertEqual(names, FEATURES)
        self.assertEqual(target_vector(ds).shape, (865,))
        self.assertEqual(matrix[7, 1], ds.records[7].snr)

    def test_custom_subset(self):
        matrix, names = feature_matrix(dataset(3), ["peak_area", "delta_tr"])
        self.assertEqual(names, ("peak_area", "delta_tr"))
        np.testing.assert_allclose(matrix[:, 0], [1000.0, 1010.0, 1020.0])

    def test_missing_features(self):
        with self.assertRaises(MissingFeature):
            feature_matrix(dataset(3), [])
        with self.assertRaises(MissingFeature):
            feature_matrix(dataset(3), ["retention_time"])
        with self.assertRaises(MissingFeature):
            feature_matrix(dataset(3), "everything")
        with_null = QualityDataset("x", (record(1), record(2, snr=None)))
        with self.assertRaises(MissingFeature):
            feature_matrix(with_null)


class TestReplicatePairing:
    def test_build_quality_table(self, tmp_path):
        sheet_path = tmp_path / "sheet.csv"
        sheet_path.write_text(
            "sequence_id,run1_id,run2_id,length,sulfur_count,injection_volume\n"
            "AAA,r1,r2,20,19,5\n"
            "BBB,r3,missing,18,4,NA\n",
            encoding="utf-8",
        )
        metrics = {
            "r1": PeakMetrics(8.00, 50.0, 200.0, 1.2, 1000.0, "r1"),
            "r2": PeakMetrics(8.01, 52.0, 220.0, 1.4, 1100.0, "r2"),
            "r3": PeakMetrics(7.00, 40.0, 100.0, 1.0, 900.0, "r3"),
        }
        ds = build_quality_table(metrics, load_sample_sheet(sheet_path), "G1")
        first, second = ds.records
        assert first.delta_tr == pytest.approx(-0.01)
        assert first.snr == 210.0
        assert first.skewness == pytest.approx(1.3)
        assert first.peak_area == 1050.0
        assert first.retention_time == pytest.approx(8.005)
        assert first.injection_volume == 5.0
        assert second.has_nulls()
        assert second.length == 18
        assert len(drop_nulls(ds)) == 1

    def test_sheet_needs_run_columns(self, tmp_path):
        path = tmp_path / "sheet.csv"
        path.write_text("sequence_id,length,sulfur_count\nA,3,1\n", encoding="utf-8")
        with pytest.raises(SchemaMismatch):
            load_sample_sheet(path)


def test_to_frame_matches_schema():
    frame = dataset(3).to_frame()
    assert list(frame.columns) == list(COLUMNS)
    assert frame["injection_volume"].isna().all()
    assert isinstance(frame, pd.DataFrame)
