"""Chromatographic quality measurements.

A detector trace is modelled as ``Y(t) = B(t) + P(t) + N(t)`` (baseline,
peak, noise). The functions below localise a peak, recover the baseline and
noise from idle parts of the trace and derive the four measurements used as
clustering features: SNR, retention-time drift, peak skewness and peak area.
A synthesizer with exponentially modified Gaussian peaks produces traces with
known ground truth.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.ndimage import uniform_filter1d
from scipy.optimize import minimize_scalar
from scipy.stats import exponnorm

from core.errors import (
    InsufficientIdleSamples,
    InvalidChromatogram,
    LevelNotBracketed,
    NoPeakFound,
    QualityEvaluationError,
    ZeroNoise,
)

logger = logging.getLogger(__name__)

__all__ = [
    "Chromatogram",
    "PeakRegion",
    "PeakMetrics",
    "NoiseEstimate",
    "SyntheticPeakSpec",
    "detect_peak",
    "estimate_baseline",
    "estimate_noise",
    "compute_snr",
    "compute_skewness",
    "compute_area",
    "delta_tr",
    "measure_peak",
    "emg_profile",
    "synthesize_chromatogram",
]

MIN_FLANK_SAMPLES = 5
MIN_NOISE_SAMPLES = 20
DETECTION_SIGMAS = 3.0
BOUNDARY_FRACTION = 0.01
SMOOTHING_WIDTH = 5


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True, eq=False)
class Chromatogram:
    """Time-ordered detector signal (times in seconds)."""

    times: np.ndarray
    intensities: np.ndarray
    id: str = ""

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        intensities = np.asarray(self.intensities, dtype=float)
        if times.ndim != 1 or intensities.ndim != 1:
            raise InvalidChromatogram("times and intensities must be 1-D.")
        if times.shape != intensities.shape:
            raise InvalidChromatogram("times and intensities differ in length.")
        if times.size < 3:
            raise InvalidChromatogram("A chromatogram needs at least 3 samples.")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(intensities)):
            raise InvalidChromatogram("Non-finite values in chromatogram.")
        if np.any(np.diff(times) <= 0):
            raise InvalidChromatogram("times must be strictly increasing.")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "intensities", intensities)

    def __len__(self) -> int:
        return int(self.times.size)

    def indices_between(self, start: float, end: float) -> np.ndarray:
        """Return indices of samples with ``start <= t <= end``."""
        lo, hi = min(start, end), max(start, end)
        return np.flatnonzero((self.times >= lo) & (self.times <= hi))

    def mirrored(self) -> Chromatogram:
        """Return the trace with its time axis reversed (t -> -t)."""
        return Chromatogram(-self.times[::-1], self.intensities[::-1], self.id)


@dataclass(frozen=True, slots=True)
class PeakRegion:
    left_index: int
    apex_index: int
    right_index: int

    def __post_init__(self) -> None:
        if not self.left_index < self.apex_index < self.right_index:
            raise QualityEvaluationError(
                "Peak region requires left_index < apex_index < right_index."
            )

    @property
    def slice(self) -> slice:
        return slice(self.left_index, self.right_index + 1)

    def mirrored(self, n_samples: int) -> PeakRegion:
        last = n_samples - 1
        return PeakRegion(
            last - self.right_index, last - self.apex_index, last - self.left_index
        )


@dataclass(frozen=True, slots=True)
class PeakMetrics:
    """Measurements of one peak; ``snr`` is None when the idle noise is zero."""

    retention_time: float  # minutes
    height: float
    snr: float | None
    skewness: float
    area: float
    chromatogram_id: str = ""


@dataclass(frozen=True, slots=True)
class NoiseEstimate:
    value: float
    is_zero: bool
    n_samples: int

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True, slots=True)
class SyntheticPeakSpec:
    """One exponentially modified Gaussian peak of a synthetic trace.

    ``amplitude`` is the apex height above the baseline; ``tau == 0`` gives a
    pure Gaussian centred on ``apex_time``.
    """

    apex_time: float
    amplitude: float
    sigma: float
    tau: float = 0.0
    baseline_offset: float = 0.0
    baseline_slope: float = 0.0
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise QualityEvaluationError("sigma must be > 0.")
        if self.amplitude <= 0:
            raise QualityEvaluationError("amplitude must be > 0.")
        if self.tau < 0:
            raise QualityEvaluationError("tau must be >= 0.")
        if self.noise_sigma < 0:
            raise QualityEvaluationError("noise_sigma must be >= 0.")


# ---------------------------------------------------------------------------
# Peak localisation
# ---------------------------------------------------------------------------


def _edge_line(times: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Line through the medians of the first and last tenth of a window."""
    edge = max(3, times.size // 10)
    t0, y0 = np.median(times[:edge]), np.median(values[:edge])
    t1, y1 = np.median(times[-edge:]), np.median(values[-edge:])
    slope = (y1 - y0) / (t1 - t0) if t1 != t0 else 0.0
    return slope, y0 - slope * t0


def _robust_noise(values: np.ndarray) -> float:
    """MAD of first differences scaled to a Gaussian sigma."""
    diffs = np.diff(values)
    if diffs.size == 0:
        return 0.0
    mad = np.median(np.abs(diffs - np.median(diffs)))
    return float(1.4826 * mad / math.sqrt(2.0))


def _walk(corrected: np.ndarray, apex: int, step: int, level: float) -> int:
    k = apex + step
    last = corrected.size - 1
    while 0 < k < last:
        if corrected[k] < level:
            return k
        # local minimum: the next sample outward rises again
        if corrected[k + step] > corrected[k]:
            return k
        k += step
    return min(max(k, 0), last)


def detect_peak(chrom: Chromatogram, search_window: tuple[float, float]) -> PeakRegion:
    """Locate the highest peak inside *search_window* (seconds).

    The apex is the maximum raw intensity inside the window. The decision
    statistic and the boundary walk use a 5-point moving average corrected by
    a line through the window's edge medians; boundaries stop where that
    corrected signal first drops below 1% of the apex height or at a local
    minimum.
    """
    idx = chrom.indices_between(*search_window)
    if idx.size < 3:
        raise NoPeakFound(f"Window {search_window} covers fewer than 3 samples.")

    times, raw = chrom.times, chrom.intensities
    slope, intercept = _edge_line(times[idx], raw[idx])
    baseline = slope * times + intercept
    smoothed = uniform_filter1d(raw, size=SMOOTHING_WIDTH, mode="nearest")
    corrected = smoothed - baseline

    noise = _robust_noise(raw[idx])
    if corrected[idx].max() <= max(DETECTION_SIGMAS * noise, 0.0):
        raise NoPeakFound(
            f"No sample in {search_window} exceeds baseline + "
            f"{DETECTION_SIGMAS:g} x noise ({noise:.4g})."
        )

    apex = int(idx[np.argmax(raw[idx])])
    if apex == 0 or apex == len(chrom) - 1:
        raise NoPeakFound("Apex lies on the chromatogram boundary.")

    height = raw[apex] - baseline[apex]
    if height <= 0:
        raise NoPeakFound("Apex is not above the estimated baseline.")
    level = BOUNDARY_FRACTION * height
    left = _walk(corrected, apex, -1, level)
    right = _walk(corrected, apex, +1, level)
    if not left < apex < right:
        raise NoPeakFound("Peak boundaries collapse onto the apex.")
    if raw[left] > raw[apex] or raw[right] > raw[apex]:
        raise NoPeakFound("Boundary intensity exceeds apex intensity.")
    return PeakRegion(left, apex, right)


# ---------------------------------------------------------------------------
# Baseline and noise
# ---------------------------------------------------------------------------


def estimate_baseline(
    chrom: Chromatogram, region: PeakRegion, flank_size: int = 10
) -> np.ndarray:
    """Linear baseline under *region* from the medians of its idle flanks.

    Each flank holds up to *flank_size* samples directly outside the region;
    the line passes through (median time, median intensity) of both flanks.
    """
    if flank_size < MIN_FLANK_SAMPLES:
        raise ValueError(f"flank_size must be >= {MIN_FLANK_SAMPLES}.")
    n = len(chrom)
    left_available = region.left_index
    right_available = n - 1 - region.right_index
    if left_available < MIN_FLANK_SAMPLES:
        raise InsufficientIdleSamples(left_available, MIN_FLANK_SAMPLES, "left flank")
    if right_available < MIN_FLANK_SAMPLES:
        raise InsufficientIdleSamples(
            right_available, MIN_FLANK_SAMPLES, "right flank"
        )

    left = slice(region.left_index - min(flank_size, left_available), region.left_index)
    right = slice(
        region.right_index + 1,
        region.right_index + 1 + min(flank_size, right_available),
    )
    t0 = float(np.median(chrom.times[left]))
    y0 = float(np.median(chrom.intensities[left]))
    t1 = float(np.median(chrom.times[right]))
    y1 = float(np.median(chrom.intensities[right]))
    slope = (y1 - y0) / (t1 - t0)
    return y0 + slope * (chrom.times[region.slice] - t0)


def estimate_noise(
    chrom: Chromatogram, idle_window: tuple[float, float]
) -> NoiseEstimate:
    """RMS of residuals after a least-squares line over *idle_window*."""
    idx = chrom.indices_between(*idle_window)
    if idx.size < MIN_NOISE_SAMPLES:
        raise InsufficientIdleSamples(idx.size, MIN_NOISE_SAMPLES)
    t = chrom.times[idx]
    y = chrom.intensities[idx]
    centred = t - t.mean()
    slope, intercept = np.polyfit(centred, y, 1)
    residuals = y - (slope * centred + intercept)
    rms = float(np.sqrt(np.mean(residuals**2)))
    scale = max(1.0, float(np.max(np.abs(y))))
    if rms <= 1e-12 * scale:
        return NoiseEstimate(0.0, True, int(idx.size))
    return NoiseEstimate(rms, False, int(idx.size))


def compute_snr(height: float, noise: float | NoiseEstimate) -> float:
    """Baseline-corrected peak height divided by RMS noise."""
    if isinstance(noise, NoiseEstimate):
        if noise.is_zero:
            raise ZeroNoise("Noise estimate is zero; SNR is undefined.")
        noise = noise.value
    if noise <= 0:
        raise ZeroNoise("Noise must be > 0.")
    if height <= 0:
        raise QualityEvaluationError("Peak height must be > 0.")
    return float(height / noise)


# ---------------------------------------------------------------------------
# Shape measurements
# ---------------------------------------------------------------------------


def _refine_apex(t: np.ndarray, y: np.ndarray, a: int) -> tuple[float, float]:
    """Sub-sample apex by a parabola through the logs of three samples.

    Exact for a noise-free Gaussian; falls back to the raw sample otherwise.
    """
    if a == 0 or a == y.size - 1 or min(y[a - 1], y[a], y[a + 1]) <= 0:
        return float(t[a]), float(y[a])
    x0, x2 = t[a - 1] - t[a], t[a + 1] - t[a]
    l0, l1, l2 = np.log(y[a - 1]), np.log(y[a]), np.log(y[a + 1])
    s0, s2 = (l0 - l1) / x0, (l2 - l1) / x2
    curvature = (s0 - s2) / (x0 - x2)
    if curvature >= 0:
        return float(t[a]), float(y[a])
    linear = s0 - curvature * x0
    offset = min(max(-linear / (2.0 * curvature), x0), x2)
    log_peak = l1 + linear * offset + curvature * offset**2
    return float(t[a] + offset), float(np.exp(log_peak))


def compute_skewness(
    chrom: Chromatogram,
    region: PeakRegion,
    baseline: np.ndarray,
    fraction: float = 0.5,
) -> float:
    """Ratio ``W_R(x) / W_L(x)`` of half-widths at ``x`` of the peak height.

    Widths are horizontal distances from the vertical line through the apex
    to the crossings of the level, each crossing found by linear
    interpolation between the bracketing samples. 1 means symmetric, > 1
    tailing, < 1 fronting.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1).")
    t = chrom.times[region.slice]
    y = chrom.intensities[region.slice] - np.asarray(baseline, dtype=float)
    if y.shape != t.shape:
        raise QualityEvaluationError("Baseline is not aligned with the region.")
    a = region.apex_index - region.left_index
    if y[a] <= 0:
        raise QualityEvaluationError("Baseline-corrected apex height must be > 0.")

    t_apex, height = _refine_apex(t, y, a)
    level = fraction * height

    below = np.flatnonzero(y[:a] < level)
    if below.size == 0:
        raise LevelNotBracketed("left", level)
    k = int(below[-1])
    t_left = t[k] + (level - y[k]) * (t[k + 1] - t[k]) / (y[k + 1] - y[k])

    below = np.flatnonzero(y[a + 1 :] < level)
    if below.size == 0:
        raise LevelNotBracketed("right", level)
    k = a + 1 + int(below[0])
    t_right = t[k - 1] + (y[k - 1] - level) * (t[k] - t[k - 1]) / (y[k - 1] - y[k])

    w_left, w_right = t_apex - t_left, t_right - t_apex
    if w_left <= 0 or w_right <= 0:
        raise LevelNotBracketed("left" if w_left <= 0 else "right", level)
    return float(w_right / w_left)


def compute_area(
    chrom: Chromatogram, region: PeakRegion, baseline: np.ndarray
) -> float:
    """Trapezoidal integral of the baseline-corrected signal over *region*."""
    corrected = chrom.intensities[region.slice] - np.asarray(baseline, dtype=float)
    area = float(trapezoid(corrected, chrom.times[region.slice]))
    if area < 0:
        logger.warning(
            "Negative peak area %.4g for chromatogram '%s'", area, chrom.id
        )
    return area


def delta_tr(tr_run1: float, tr_run2: float) -> float:
    """Retention-time drift between two replicate runs, ``t_R,1 - t_R,2``."""
    for value in (tr_run1, tr_run2):
        if not math.isfinite(value) or value <= 0:
            raise QualityEvaluationError(
                f"Retention times must be finite and > 0, got {value!r}."
            )
    return tr_run1 - tr_run2


def measure_peak(
    chrom: Chromatogram,
    search_window: tuple[float, float],
    idle_window: tuple[float, float] | None = None,
    fraction: float = 0.5,
    flank_size: int = 10,
) -> PeakMetrics:
    """Run detection, baseline, noise and all measurements for one peak.

    Without *idle_window* the noise is taken from the trace start up to the
    left flank of the detected peak.
    """
    region = detect_peak(chrom, search_window)
    baseline = estimate_baseline(chrom, region, flank_size)
    if idle_window is None:
        end = max(region.left_index - flank_size - 1, 0)
        idle_window = (float(chrom.times[0]), float(chrom.times[end]))
    noise = estimate_noise(chrom, idle_window)

    offset = region.apex_index - region.left_index
    height = float(chrom.intensities[region.apex_index] - baseline[offset])
    try:
        snr: float | None = compute_snr(height, noise)
    except ZeroNoise:
        logger.warning("Zero noise in '%s'; SNR left undefined", chrom.id)
        snr = None

    return PeakMetrics(
        retention_time=float(chrom.times[region.apex_index]) / 60.0,
        height=height,
        snr=snr,
        skewness=compute_skewness(chrom, region, baseline, fraction),
        area=compute_area(chrom, region, baseline),
        chromatogram_id=chrom.id,
    )


# ---------------------------------------------------------------------------
# Synthesis
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _emg_mode(shape: float) -> tuple[float, float]:
    """Mode and density maximum of the standard exponnorm with ``K = shape``."""
    result = minimize_scalar(
        lambda x: -exponnorm.pdf(x, shape),
        bounds=(-1.0, shape + 1.0),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(result.x), float(exponnorm.pdf(result.x, shape))


def emg_profile(
    times: np.ndarray, apex_time: float, amplitude: float, sigma: float, tau: float
) -> np.ndarray:
    """Exponentially modified Gaussian scaled so its apex equals *amplitude*."""
    times = np.asarray(times, dtype=float)
    if tau == 0:
        return amplitude * np.exp(-0.5 * ((times - apex_time) / sigma) ** 2)
    shape = tau / sigma
    mode, peak = _emg_mode(shape)
    centre = apex_time - mode * sigma
    return amplitude * exponnorm.pdf((times - centre) / sigma, shape) / peak


def synthesize_chromatogram(
    specs: Sequence[SyntheticPeakSpec],
    duration: float,
    sample_rate: float,
    seed: int,
    *,
    baseline_offset: float = 0.0,
    baseline_slope: float = 0.0,
    noise_sigma: float = 0.0,
    chromatogram_id: str = "synthetic",
) -> Chromatogram:
    """Build ``Y(t) = B(t) + sum of peaks + N(t)`` sampled on ``[0, duration]``.

    Baseline terms of all specs (and the keyword arguments) add up; noise
    sigmas add in quadrature. The noise stream is seeded from *seed* together
    with every spec's ``rng_seed``.
    """
    if duration <= 0 or sample_rate <= 0:
        raise QualityEvaluationError("duration and sample_rate must be > 0.")
    n = int(round(duration * sample_rate)) + 1
    times = np.arange(n) / sample_rate

    offset = baseline_offset + sum(s.baseline_offset for s in specs)
    slope = baseline_slope + sum(s.baseline_slope for s in specs)
    intensities = offset + slope * times
    for spec in specs:
        intensities = intensities + emg_profile(
            times, spec.apex_time, spec.amplitude, spec.sigma, spec.tau
        )

    sigma = math.sqrt(noise_sigma**2 + sum(s.noise_sigma**2 for s in specs))
    if sigma > 0:
        rng = np.random.default_rng([seed, *(s.rng_seed for s in specs)])
        intensities = intensities + rng.normal(0.0, sigma, size=n)
    return Chromatogram(times, intensities, chromatogram_id)
