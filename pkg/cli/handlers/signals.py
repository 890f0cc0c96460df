"""Handlers for chromatogram synthesis, peak measurement and replicate pairing."""

import argparse
import logging

import pandas as pd

from cli import responses
from cli.handlers import output_dir, pipeline_config
from core.dependencies import get_repository
from core.errors import ConfigError
from repositories.chromatograms import (
    read_chromatogram,
    read_peak_metrics,
    write_chromatogram,
    write_peak_metrics,
)
from services.signal import measure_peak
from services.synthetic import chromatogram_from_config, generate_tiered_dataset
from services.tabular import build_quality_table, load_sample_sheet, save_csv
from tools.seeding import derive_seed
from tools.texts import format_number

logger = logging.getLogger(__name__)


async def synth(args: argparse.Namespace) -> int:
    config = pipeline_config(args)
    out = output_dir(args, config)
    synthetic = config.dataset.synthetic
    logger.info("Synthesizing into %s with seed %d", out, config.seed)
    if not config.chromatograms and synthetic is None:
        raise ConfigError(responses.NOTHING_TO_SYNTHESIZE)

    # index 0 of the synthetic stage belongs to the tiered dataset
    for index, spec in enumerate(config.chromatograms, start=1):
        chrom = chromatogram_from_config(spec, derive_seed(config.seed, "synthetic", index))
        path = write_chromatogram(chrom, out / "chromatograms" / f"{spec.id}.csv")
        print(responses.CHROMATOGRAM_WRITTEN.format(id=spec.id, samples=len(chrom), path=path))

    if synthetic is not None:
        name = config.dataset.name
        ds, tiers = generate_tiered_dataset(synthetic, derive_seed(config.seed, "synthetic"), name)
        path = save_csv(ds, out / f"{name}.csv")
        get_repository().write_table(
            pd.DataFrame(
                {
                    "sequence_id": [r.sequence_id for r in ds.records],
                    "tier": [synthetic.tiers[t].name for t in tiers],
                }
            ),
            out / f"{name}_tiers.csv",
        )
        print(
            responses.DATASET_WRITTEN.format(
                name=name, rows=len(ds), tiers=len(synthetic.tiers), path=path
            )
        )
    return 0


async def peaks(args: argparse.Namespace) -> int:
    config = pipeline_config(args, required=False)
    window_config = config.peaks if config is not None else None

    search = args.window or (window_config.search_window if window_config else None)
    if search is None:
        raise ConfigError(responses.WINDOW_REQUIRED)
    idle = args.idle or (window_config.idle_window if window_config else None)
    fraction = args.fraction or (window_config.fraction if window_config else 0.5)
    flank = window_config.flank_size if window_config else 10

    measured = []
    for path in args.chromatograms:
        chrom = read_chromatogram(path)
        metrics = measure_peak(
            chrom, tuple(search), tuple(idle) if idle else None, fraction, flank
        )
        measured.append(metrics)
        print(
            responses.PEAK_MEASURED.format(
                id=metrics.chromatogram_id,
                retention_time=metrics.retention_time,
                snr=format_number(metrics.snr, 1),
                skewness=metrics.skewness,
                area=metrics.area,
            )
        )

    target = args.output or output_dir(args, config) / "peaks.csv"
    path = write_peak_metrics(measured, target)
    print(responses.PEAKS_WRITTEN.format(count=len(measured), path=path))
    return 0


async def build_table(args: argparse.Namespace) -> int:
    metrics = {}
    for path in args.metrics:
        metrics.update(read_peak_metrics(path))
    sheet = load_sample_sheet(args.sheet)
    ds = build_quality_table(metrics, sheet, args.name)

    target = args.output or output_dir(args) / f"{args.name}.csv"
    path = save_csv(ds, target)
    incomplete = sum(r.has_nulls() for r in ds.records)
    print(
        responses.TABLE_WRITTEN.format(
            name=ds.name, rows=len(ds), incomplete=incomplete, path=path
        )
    )
    return 0
