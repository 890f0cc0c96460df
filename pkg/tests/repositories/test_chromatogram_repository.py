from pathlib import Path

import numpy as np
import pytest

from core.errors import InvalidChromatogram, SchemaMismatch
from repositories.chromatograms import (
    read_chromatogram,
    read_peak_metrics,
    write_chromatogram,
    write_peak_metrics,
)
from services.signal import Chromatogram, PeakMetrics


class TestChromatogramFiles:
    def test_write_then_read(self, tmp_path: Path):
        chrom = Chromatogram(np.arange(5) * 0.5, np.array([1.0, 2.5, 9.0, 2.5, 1.0]), "r1")
        path = write_chromatogram(chrom, tmp_path / "traces" / "r1.csv")
        loaded = read_chromatogram(path)
        assert loaded.id == "r1"
        np.testing.assert_array_equal(loaded.times, chrom.times)
        np.testing.assert_array_equal(loaded.intensities, chrom.intensities)
        assert read_chromatogram(path, "other").id == "other"

    def test_wrong_header(self, tmp_path: Path):
        path = tmp_path / "x.csv"
        path.write_text("t,y\n0,1\n1,2\n2,3\n", encoding="utf-8")
        with pytest.raises(SchemaMismatch):
            read_chromatogram(path)

    def test_non_numeric_sample(self, tmp_path: Path):
        path = tmp_path / "x.csv"
        path.write_text("time_s,intensity\n0,1\n1,abc\n2,3\n", encoding="utf-8")
        with pytest.raises(InvalidChromatogram):
            read_chromatogram(path)

    def test_unordered_times(self, tmp_path: Path):
        path = tmp_path / "x.csv"
        path.write_text("time_s,intensity\n0,1\n2,2\n1,3\n", encoding="utf-8")
        with pytest.raises(InvalidChromatogram):
            read_chromatogram(path)


class TestPeakMetricFiles:
    def test_write_then_read(self, tmp_path: Path):
        metrics = [
            PeakMetrics(8.25, 120.0, 350.5, 1.125, 2048.0, "001"),
            PeakMetrics(8.5, 60.0, None, 1.5, 1024.0, "002"),
        ]
        path = write_peak_metrics(metrics, tmp_path / "peaks.csv")
        assert path.read_text(encoding="utf-8").splitlines()[0] == (
            "chromatogram_id,retention_time,height,snr,skewness,area"
        )
        loaded = read_peak_metrics(path)
        assert list(loaded) == ["001", "002"]
        assert loaded["001"] == metrics[0]
        assert loaded["002"].snr is None

    def test_missing_column(self, tmp_path: Path):
        path = tmp_path / "peaks.csv"
        path.write_text("chromatogram_id,retention_time\nr1,8.0\n", encoding="utf-8")
        with pytest.raises(SchemaMismatch):
            read_peak_metrics(path)
