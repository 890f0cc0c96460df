"""Argument tree of the ``quality-clusters`` command."""

from __future__ import annotations

import argparse
from pathlib import Path

from repositories.reports import FORMATS

__all__ = ["COMMANDS", "build_parser"]

COMMANDS = ("synth", "peaks", "build-table", "cluster", "evaluate", "run", "report")


def _add_global_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="pipeline TOML config")
    parser.add_argument("--seed", type=int, help="master seed (overrides the config)")
    parser.add_argument("--out", type=Path, help="output directory (overrides the config)")
    parser.add_argument(
        "--format",
        dest="formats",
        action="append",
        choices=FORMATS,
        help="report format; repeat for several (default: all)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quality-clusters",
        description="Cluster chromatographic quality records and score each cluster with a regressor.",
    )
    _add_global_flags(parser)
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    commands.add_parser(
        "synth", help="generate configured chromatograms and the synthetic dataset"
    )

    peaks = commands.add_parser("peaks", help="measure one peak per chromatogram CSV")
    peaks.add_argument("chromatograms", nargs="+", type=Path, help="time_s,intensity CSV files")
    peaks.add_argument(
        "--window", nargs=2, type=float, metavar=("START", "END"), help="search window in seconds"
    )
    peaks.add_argument(
        "--idle", nargs=2, type=float, metavar=("START", "END"), help="peak-free noise window in seconds"
    )
    peaks.add_argument("--fraction", type=float, help="height fraction for skewness (default 0.5)")
    peaks.add_argument("--output", type=Path, help="peak metrics CSV (default: <out>/peaks.csv)")

    table = commands.add_parser("build-table", help="pair replicate runs into a quality table")
    table.add_argument(
        "--metrics", nargs="+", type=Path, required=True, help="peak metrics CSV file(s)"
    )
    table.add_argument("--sheet", type=Path, required=True, help="sample sheet CSV")
    table.add_argument("--name", default="quality", help="dataset name")
    table.add_argument("--output", type=Path, help="quality table CSV (default: <out>/<name>.csv)")

    cluster = commands.add_parser("cluster", help="scale, reduce and cluster a quality table")
    cluster.add_argument("--table", type=Path, help="quality table CSV (overrides dataset.path)")

    evaluate = commands.add_parser("evaluate", help="score per-cluster models for stored labels")
    evaluate.add_argument(
        "--labels", type=Path, required=True, help="assignments.csv written by 'cluster'"
    )
    evaluate.add_argument("--table", type=Path, help="quality table CSV (overrides dataset.path)")

    run = commands.add_parser("run", help="full pipeline with reports")
    run.add_argument("--table", type=Path, help="quality table CSV (overrides dataset.path)")

    report = commands.add_parser("report", help="re-render a stored report.json")
    report.add_argument("report", type=Path, help="report.json or the directory holding it")

    return parser
