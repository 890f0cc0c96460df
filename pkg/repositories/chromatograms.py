"""CSV storage of chromatograms (``time_s,intensity``) and peak measurements."""

from __future__ import annotations

import logging
from dataclasses import asdict
from pathlib import Path
from typing import Iterable

import pandas as pd

from core.errors import InvalidChromatogram, SchemaMismatch
from services.signal import Chromatogram, PeakMetrics

logger = logging.getLogger(__name__)

__all__ = [
    "CHROMATOGRAM_HEADER",
    "PEAK_COLUMNS",
    "read_chromatogram",
    "write_chromatogram",
    "read_peak_metrics",
    "write_peak_metrics",
]

CHROMATOGRAM_HEADER = ("time_s", "intensity")
PEAK_COLUMNS = ("chromatogram_id", "retention_time", "height", "snr", "skewness", "area")


def read_chromatogram(path: str | Path, chromatogram_id: str | None = None) -> Chromatogram:
    """Load a two-column trace; the id defaults to the file stem."""
    path = Path(path)
    frame = pd.read_csv(path)
    if tuple(c.strip() for c in frame.columns) != CHROMATOGRAM_HEADER:
        raise SchemaMismatch(f"{path}: expected header {','.join(CHROMATOGRAM_HEADER)}")
    try:
        values = frame.to_numpy(dtype=float)
    except ValueError as exc:
        raise InvalidChromatogram(f"{path}: non-numeric sample ({exc})") from None
    return Chromatogram(values[:, 0], values[:, 1], chromatogram_id or path.stem)


def write_chromatogram(chrom: Chromatogram, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({"time_s": chrom.times, "intensity": chrom.intensities})
    frame.to_csv(path, index=False, float_format="%.12g")
    logger.debug("Wrote chromatogram %s (%d samples)", path, len(chrom))
    return path


def write_peak_metrics(metrics: Iterable[PeakMetrics], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([asdict(m) for m in metrics], columns=list(PEAK_COLUMNS))
    frame.to_csv(path, index=False, na_rep="NA", float_format="%.10g")
    return path


def read_peak_metrics(path: str | Path) -> dict[str, PeakMetrics]:
    """Peak measurements keyed by chromatogram id; ``NA`` SNR becomes None."""
    frame = pd.read_csv(
        Path(path), dtype={"chromatogram_id": str}, na_values=["NA", "-", ""], keep_default_na=False
    )
    missing = [c for c in PEAK_COLUMNS if c not in frame.columns]
    if missing:
        raise SchemaMismatch(f"{path}: missing column(s) {', '.join(missing)}")
    metrics: dict[str, PeakMetrics] = {}
    for row in frame.to_dict(orient="records"):
        snr = row["snr"]
        metrics[row["chromatogram_id"]] = PeakMetrics(
            retention_time=float(row["retention_time"]),
            height=float(row["height"]),
            snr=None if pd.isna(snr) else float(snr),
            skewness=float(row["skewness"]),
            area=float(row["area"]),
            chromatogram_id=row["chromatogram_id"],
        )
    return metrics
