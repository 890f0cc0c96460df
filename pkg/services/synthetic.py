"""Synthetic fixtures: planted quality tiers and configured chromatograms."""

from __future__ import annotations

import logging

import numpy as np

from core.pipeline_config import ChromatogramConfig, SyntheticDatasetConfig
from services.signal import Chromatogram, SyntheticPeakSpec, synthesize_chromatogram
from services.tabular import QualityDataset, QualityRecord

logger = logging.getLogger(__name__)

__all__ = ["retention_model", "generate_tiered_dataset", "chromatogram_from_config"]


def retention_model(length: np.ndarray, sulfur: np.ndarray) -> np.ndarray:
    """Noise-free retention time (minutes) as a smooth function of composition."""
    length = np.asarray(length, dtype=float)
    sulfur = np.asarray(sulfur, dtype=float)
    return 2.0 + 0.45 * length + 0.08 * sulfur + 0.5 * np.sin(length / 3.0)


def _normal(rng: np.random.Generator, spec: tuple[float, float], size: int) -> np.ndarray:
    mean, std = spec
    return rng.normal(mean, std, size)


def generate_tiered_dataset(
    config: SyntheticDatasetConfig, seed: int, name: str = "synthetic"
) -> tuple[QualityDataset, np.ndarray]:
    """Draw every tier's rows; returns the dataset and each row's tier index.

    SNR, skewness and area are kept strictly positive by clipping.
    """
    rng = np.random.default_rng(seed)
    records: list[QualityRecord] = []
    tiers: list[int] = []
    for t, tier in enumerate(config.tiers):
        n = tier.rows
        snr = np.clip(_normal(rng, tier.snr, n), 1.0, None)
        skewness = np.clip(_normal(rng, tier.skewness, n), 0.05, None)
        drift = _normal(rng, tier.delta_tr, n)
        area = np.clip(_normal(rng, tier.peak_area, n), 1.0, None)
        length = np.clip(
            np.rint(rng.normal(config.length_mean, config.length_std, n)),
            config.length_min,
            config.length_max,
        ).astype(int)
        sulfur = rng.binomial(length - 1, config.sulfur_probability)
        target = retention_model(length, sulfur) + rng.normal(0.0, tier.target_noise, n)
        # keep the target positive even for extreme draws
        target = np.clip(target, 0.1, None)
        for i in range(n):
            records.append(
                QualityRecord(
                    sequence_id=f"{tier.name}-{i:04d}",
                    delta_tr=float(drift[i]),
                    snr=float(snr[i]),
                    skewness=float(skewness[i]),
                    peak_area=float(area[i]),
                    length=int(length[i]),
                    sulfur_count=int(sulfur[i]),
                    injection_volume=None,
                    retention_time=float(target[i]),
                )
            )
        tiers.extend([t] * n)
        logger.debug("Tier %s: %d rows", tier.name, n)
    logger.info("Generated %d synthetic records in %d tiers", len(records), len(config.tiers))
    return QualityDataset(name, tuple(records)), np.asarray(tiers, dtype=int)


def chromatogram_from_config(config: ChromatogramConfig, seed: int) -> Chromatogram:
    specs = [SyntheticPeakSpec(**peak.model_dump()) for peak in config.peaks]
    return synthesize_chromatogram(
        specs,
        config.duration,
        config.sample_rate,
        seed,
        baseline_offset=config.baseline_offset,
        baseline_slope=config.baseline_slope,
        noise_sigma=config.noise_sigma,
        chromatogram_id=config.id,
    )
