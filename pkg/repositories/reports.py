"""Filesystem persistence for evaluation reports and their side tables."""

from __future__ import annotations

import io
import logging
from pathlib import Path
from typing import Iterable, Mapping, Protocol

import pandas as pd
from pydantic import ValidationError

from core.errors import ConfigError
from services.reports import (
    ClusteringSummary,
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

logger = logging.getLogger(__name__)

__all__ = [
    "FORMATS",
    "ReportRepositoryProtocol",
    "ReportRepository",
    "emit_report",
    "load_report",
]

FORMATS = ("json", "csv", "md")
REPORT_FILE = "report.json"
CLUSTERING_FILE = "clusters"


class ReportRepositoryProtocol(Protocol):
    """Abstract interface for report persistence."""

    def emit_report(
        self,
        report: EvaluationReport,
        output_dir: Path,
        formats: Iterable[str] = FORMATS,
        tables: Mapping[str, pd.DataFrame] | None = None,
    ) -> list[Path]:  # noqa: D401
        """Write the report in *formats* plus auxiliary *tables*; return paths."""

    def load_report(self, path: Path) -> EvaluationReport:  # noqa: D401
        """Parse a stored ``report.json``."""


def _check_formats(formats: Iterable[str]) -> set[str]:
    formats = set(formats)
    unknown = formats - set(FORMATS)
    if unknown:
        raise ConfigError(f"Unknown report format(s): {', '.join(sorted(unknown))}")
    return formats


def _frame_text(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n", na_rep="NA", float_format="%.10g")
    return buffer.getvalue()


class ReportRepository:
    """Writes UTF-8 text files below an output directory."""

    def _write(self, path: Path, text: str) -> Path:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            logger.error("Cannot write %s: %s", path, exc)
            raise OSError(exc.errno, f"Cannot write report file {path}: {exc.strerror}") from exc
        logger.info("Wrote %s", path)
        return path

    def emit_report(
        self,
        report: EvaluationReport,
        output_dir: Path,
        formats: Iterable[str] = FORMATS,
        tables: Mapping[str, pd.DataFrame] | None = None,
    ) -> list[Path]:
        formats = _check_formats(formats)
        output_dir = Path(output_dir)
        written: list[Path] = []
        if "json" in formats:
            written.append(self._write(output_dir / REPORT_FILE, canonical_json(report)))
        if "csv" in formats:
            written.append(self._write(output_dir / "metrics.csv", metrics_csv(report.evaluations)))
            written.append(
                self._write(output_dir / "metrics_detail.csv", metrics_detail_csv(report.evaluations))
            )
            written += self._write_cluster_csvs(report, output_dir)
        if "md" in formats:
            written.append(self._write(output_dir / "report.md", render_markdown(report)))
        written += self._write_tables(tables, output_dir)
        return written

    def emit_clustering(
        self,
        summary: ClusteringSummary,
        output_dir: Path,
        formats: Iterable[str] = FORMATS,
        tables: Mapping[str, pd.DataFrame] | None = None,
    ) -> list[Path]:
        """Write a clustering summary in *formats*; *tables* are always written."""
        formats = _check_formats(formats)
        output_dir = Path(output_dir)
        written: list[Path] = []
        if "json" in formats:
            written.append(
                self._write(output_dir / f"{CLUSTERING_FILE}.json", canonical_json(summary))
            )
        if "csv" in formats:
            written += self._write_cluster_csvs(summary, output_dir)
        if "md" in formats:
            written.append(
                self._write(output_dir / f"{CLUSTERING_FILE}.md", render_clustering_markdown(summary))
            )
        written += self._write_tables(tables, output_dir)
        return written

    def _write_cluster_csvs(
        self, source: EvaluationReport | ClusteringSummary, output_dir: Path
    ) -> list[Path]:
        written = [
            self._write(output_dir / "elbow.csv", elbow_csv(source)),
            self._write(output_dir / "silhouette.csv", silhouette_csv(source)),
        ]
        for stats in source.clusters:
            written.append(
                self._write(output_dir / f"cluster_{stats.cluster}_stats.csv", cluster_stats_csv(stats))
            )
        return written

    def _write_tables(
        self, tables: Mapping[str, pd.DataFrame] | None, output_dir: Path
    ) -> list[Path]:
        return [
            self._write(output_dir / f"{stem}.csv", _frame_text(frame))
            for stem, frame in (tables or {}).items()
        ]

    def write_text(self, text: str, path: Path) -> Path:
        return self._write(Path(path), text)

    def write_table(self, frame: pd.DataFrame, path: Path) -> Path:
        return self._write(Path(path), _frame_text(frame))

    def load_report(self, path: Path) -> EvaluationReport:
        path = Path(path)
        if path.is_dir():
            path = path / REPORT_FILE
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ConfigError(f"Report not found: {path}") from None
        try:
            return EvaluationReport.model_validate_json(text)
        except ValidationError as exc:
            raise ConfigError(f"{path}: not a valid report ({exc.error_count()} error(s))") from None


_default = ReportRepository()


def emit_report(
    report: EvaluationReport,
    output_dir: str | Path,
    formats: Iterable[str] = FORMATS,
    tables: Mapping[str, pd.DataFrame] | None = None,
) -> list[Path]:
    return _default.emit_report(report, Path(output_dir), formats, tables)


def load_report(path: str | Path) -> EvaluationReport:
    return _default.load_report(Path(path))
