"""Handlers for model evaluation, the full pipeline and report re-rendering."""

import argparse
import logging
from typing import Iterable

import pandas as pd

from cli import responses
from cli.handlers import formats, output_dir, pipeline_config
from core.dependencies import get_pipeline_service, get_repository
from core.errors import ConfigError
from services.reports import ClusterEvaluation, metrics_csv, metrics_detail_csv
from tools.texts import format_number

logger = logging.getLogger(__name__)


def _print_evaluations(evaluations: Iterable[ClusterEvaluation]) -> None:
    for e in evaluations:
        details = ""
        if e.status == "modeled":
            details = responses.MODEL_DETAILS.format(
                family=e.family,
                rmse=format_number(e.test.rmse if e.test else None, 3),
                r2=format_number(e.test.r2 if e.test else None, 3),
            )
        elif e.message:
            details = f" ({e.message})"
        print(
            responses.CLUSTER_RESULT.format(
                cluster=e.cluster, status=e.status.replace("_", " "), details=details
            )
        )


async def evaluate(args: argparse.Namespace) -> int:
    config = pipeline_config(args)
    out = output_dir(args, config)
    try:
        assignments = pd.read_csv(args.labels, dtype={"sequence_id": str})
    except FileNotFoundError:
        raise ConfigError(f"Labels file not found: {args.labels}") from None

    outcomes = await get_pipeline_service().evaluate_labels(config, assignments)
    evaluations = [o.evaluation for o in outcomes]
    repo = get_repository()
    written = [
        repo.write_text(metrics_csv(evaluations), out / "metrics.csv"),
        repo.write_text(metrics_detail_csv(evaluations), out / "metrics_detail.csv"),
    ]
    for outcome in outcomes:
        if outcome.searches:
            frame = pd.concat([s.score_frame() for s in outcome.searches.values()])
            written.append(
                repo.write_table(frame, out / f"cv_scores_cluster_{outcome.evaluation.cluster}.csv")
            )
    _print_evaluations(evaluations)
    print(responses.FILES_WRITTEN.format(count=len(written), path=out))
    return 0


async def run(args: argparse.Namespace) -> int:
    config = pipeline_config(args)
    result, paths = await get_pipeline_service().run_and_emit(config, formats(args))
    _print_evaluations(result.report.evaluations)
    print(responses.RANKING.format(ranking=", ".join(map(str, result.feedback.ranking))))
    print(responses.FILES_WRITTEN.format(count=len(paths), path=config.output_dir))
    return 0


async def report(args: argparse.Namespace) -> int:
    repo = get_repository()
    stored = repo.load_report(args.report)
    source_dir = args.report if args.report.is_dir() else args.report.parent
    out = args.out or source_dir
    logger.info("Re-rendering %s into %s", args.report, out)
    paths = repo.emit_report(stored, out, formats(args))
    print(
        responses.REPORT_RENDERED.format(dataset=stored.dataset, count=len(paths), path=out)
    )
    return 0
