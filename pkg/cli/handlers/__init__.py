"""Command handlers; every handler takes the parsed namespace and returns an exit code."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Awaitable, Callable

from cli import responses
from core.errors import ConfigError
from core.pipeline_config import PipelineConfig, load_config
from repositories.reports import FORMATS

Handler = Callable[[argparse.Namespace], Awaitable[int]]


def pipeline_config(args: argparse.Namespace, required: bool = True) -> PipelineConfig | None:
    """Load ``--config`` and apply ``--seed``, ``--out`` and ``--table``."""
    if args.config is None:
        if required:
            raise ConfigError(responses.CONFIG_REQUIRED.format(command=args.command))
        return None
    config = load_config(args.config).with_overrides(seed=args.seed, output_dir=args.out)
    table = getattr(args, "table", None)
    if table is not None:
        dataset = config.dataset.model_copy(update={"path": Path(table), "synthetic": None})
        config = config.model_copy(update={"dataset": dataset})
    return config


def output_dir(args: argparse.Namespace, config: PipelineConfig | None = None) -> Path:
    if args.out is not None:
        return Path(args.out)
    return config.output_dir if config is not None else Path("out")


def formats(args: argparse.Namespace) -> tuple[str, ...]:
    return tuple(dict.fromkeys(args.formats)) if args.formats else FORMATS


def handlers() -> dict[str, Handler]:
    from cli.handlers import clustering, evaluation, signals

    return {
        "synth": signals.synth,
        "peaks": signals.peaks,
        "build-table": signals.build_table,
        "cluster": clustering.cluster,
        "evaluate": evaluation.evaluate,
        "run": evaluation.run,
        "report": evaluation.report,
    }
