"""Quality-measurement dataset: schema, CSV ingestion, scaling and splitting."""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from core.errors import (
    DegenerateRange,
    EmptyDataset,
    MissingFeature,
    ParseError,
    QualityEvaluationError,
    SchemaMismatch,
    ZeroVarianceFeature,
)
from services.signal import PeakMetrics, delta_tr

logger = logging.getLogger(__name__)

__all__ = [
    "COLUMNS",
    "FEATURES",
    "TARGET",
    "NULL_MARKERS",
    "QualityRecord",
    "record_violation",
    "QualityDataset",
    "StandardScaling",
    "MinMaxScaling",
    "ScalingParams",
    "load_csv",
    "save_csv",
    "drop_nulls",
    "standardize",
    "normalize",
    "fit_scaling",
    "apply_scaling",
    "split_indices",
    "split_train_test",
    "feature_matrix",
    "target_vector",
    "load_sample_sheet",
    "build_quality_table",
]

COLUMNS = (
    "sequence_id",
    "delta_tr",
    "snr",
    "skewness",
    "peak_area",
    "length",
    "sulfur_count",
    "injection_volume",
    "retention_time",
)
FEATURES = ("delta_tr", "snr", "skewness", "peak_area", "length", "sulfur_count")
TARGET = "retention_time"
OPTIONAL_COLUMNS = frozenset({"injection_volume"})
INTEGER_COLUMNS = frozenset({"length", "sulfur_count"})
NULL_MARKERS = ["NA", "-", ""]

FEATURE_SETS: dict[str, tuple[str, ...]] = {
    "clustering": FEATURES,
    "regression": FEATURES,
}


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


def record_violation(values: Mapping[str, float | int | None]) -> tuple[str, str] | None:
    """Return ``(column, message)`` for the first violated invariant."""
    snr, skewness = values.get("snr"), values.get("skewness")
    length, sulfur = values.get("length"), values.get("sulfur_count")
    retention_time = values.get(TARGET)
    if snr is not None and not snr > 0:
        return "snr", "snr must be > 0"
    if skewness is not None and not skewness > 0:
        return "skewness", "skewness must be > 0"
    if length is not None and length < 1:
        return "length", "length must be >= 1"
    if sulfur is not None:
        if sulfur < 0:
            return "sulfur_count", "sulfur_count must be >= 0"
        # phosphorothioate linkages sit between adjacent nucleotides
        if length is not None and sulfur > length - 1:
            return "sulfur_count", "sulfur_count exceeds length - 1 linkages"
    if retention_time is not None and not retention_time > 0:
        return TARGET, "retention_time must be > 0"
    return None


@dataclass(frozen=True, slots=True)
class QualityRecord:
    """One compound: quality measurements, composition and target t_R.

    Numeric fields are ``None`` where the source cell held a null marker.
    """

    sequence_id: str
    delta_tr: float | None
    snr: float | None
    skewness: float | None
    peak_area: float | None
    length: int | None
    sulfur_count: int | None
    injection_volume: float | None
    retention_time: float | None

    def __post_init__(self) -> None:
        violation = record_violation(
            {name: getattr(self, name) for name in COLUMNS[1:]}
        )
        if violation:
            _, message = violation
            raise QualityEvaluationError(f"{self.sequence_id}: {message}")

    def has_nulls(self, columns: Iterable[str] = (*FEATURES, TARGET)) -> bool:
        return any(getattr(self, name) is None for name in columns)


@dataclass(frozen=True, slots=True)
class QualityDataset:
    name: str
    records: tuple[QualityRecord, ...]
    feature_names: tuple[str, ...] = FEATURES

    def __len__(self) -> int:
        return len(self.records)

    def subset(self, indices: Sequence[int] | np.ndarray) -> QualityDataset:
        """Dataset holding the records at *indices*, in that order."""
        return replace(self, records=tuple(self.records[int(i)] for i in indices))

    def column(self, name: str) -> np.ndarray:
        """Float column with NaN for nulls."""
        return np.array(
            [
                np.nan if (value := getattr(r, name)) is None else float(value)
                for r in self.records
            ],
            dtype=float,
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            [{f.name: getattr(r, f.name) for f in fields(QualityRecord)} for r in self.records],
            columns=list(COLUMNS),
        )
        for name in COLUMNS[1:]:
            frame[name] = pd.to_numeric(frame[name], errors="coerce").astype(float)
        return frame


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------


def _parse_cell(raw: str | None, column: str, row: int) -> float | int | None:
    if raw is None or (isinstance(raw, float) and math.isnan(raw)):
        return None
    text = str(raw).strip()
    if text in NULL_MARKERS:
        return None
    try:
        value = float(text)
    except ValueError:
        raise ParseError(row, column, raw, "not a number") from None
    if not math.isfinite(value):
        raise ParseError(row, column, raw, "not finite")
    if column in INTEGER_COLUMNS:
        if not value.is_integer():
            raise ParseError(row, column, raw, "expected an integer")
        return int(value)
    return value


def load_csv(path: str | Path, name: str | None = None) -> QualityDataset:
    """Parse a quality table; rows keep file order and are numbered from 1."""
    path = Path(path)
    frame = pd.read_csv(
        path,
        dtype=str,
        na_values=NULL_MARKERS,
        keep_default_na=False,
        skipinitialspace=True,
    )
    frame.columns = [c.strip() for c in frame.columns]
    missing = [c for c in COLUMNS if c not in frame.columns and c not in OPTIONAL_COLUMNS]
    if missing:
        raise SchemaMismatch(f"{path}: missing required column(s) {', '.join(missing)}")
    extra = [c for c in frame.columns if c not in COLUMNS]
    if extra:
        logger.warning("Ignoring extra column(s) in %s: %s", path, ", ".join(extra))

    records: list[QualityRecord] = []
    for row, values in enumerate(frame.to_dict(orient="records"), start=1):
        sequence_id = values.get("sequence_id")
        if sequence_id is None or (isinstance(sequence_id, float) and math.isnan(sequence_id)):
            raise ParseError(row, "sequence_id", sequence_id, "missing identifier")
        parsed = {
            column: _parse_cell(values.get(column), column, row)
            for column in COLUMNS[1:]
        }
        violation = record_violation(parsed)
        if violation:
            column, message = violation
            raise ParseError(row, column, parsed[column], message)
        records.append(QualityRecord(str(sequence_id).strip(), **parsed))

    logger.info("Loaded %d records from %s", len(records), path)
    return QualityDataset(name or path.stem, tuple(records))


def save_csv(ds: QualityDataset, path: str | Path) -> Path:
    """Write *ds* with the canonical header; nulls become ``NA``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [{c: getattr(r, c) for c in COLUMNS} for r in ds.records], columns=list(COLUMNS)
    )
    for column in INTEGER_COLUMNS:
        frame[column] = frame[column].astype("Int64")
    frame.to_csv(path, index=False, na_rep="NA", float_format="%.10g")
    return path


def drop_nulls(ds: QualityDataset) -> QualityDataset:
    """Drop records with a null in any model feature or the target.

    ``injection_volume`` is not a model input, so its nulls are kept.
    """
    kept = tuple(r for r in ds.records if not r.has_nulls())
    dropped = len(ds) - len(kept)
    if not kept:
        raise EmptyDataset(f"All {len(ds)} records of '{ds.name}' contain nulls.")
    if dropped:
        logger.info("Dropped %d null-bearing record(s) from '%s'", dropped, ds.name)
    return replace(ds, records=kept)


# ---------------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------------


def _labels(columns: Sequence[str] | None, width: int) -> tuple[str, ...]:
    return tuple(columns) if columns is not None else tuple(f"x{i}" for i in range(width))


def _fingerprint(matrix: np.ndarray, columns: Sequence[str]) -> str:
    digest = hashlib.sha256()
    digest.update(",".join(columns).encode())
    digest.update(np.ascontiguousarray(matrix, dtype=np.float64).tobytes())
    return digest.hexdigest()[:16]


@dataclass(frozen=True, slots=True, eq=False)
class StandardScaling:
    mean: np.ndarray
    std: np.ndarray  # population std
    columns: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist(), "columns": list(self.columns)}


@dataclass(frozen=True, slots=True, eq=False)
class MinMaxScaling:
    minimum: np.ndarray
    maximum: np.ndarray
    columns: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "min": self.minimum.tolist(),
            "max": self.maximum.tolist(),
            "columns": list(self.columns),
        }


@dataclass(frozen=True, slots=True, eq=False)
class ScalingParams:
    """Train-fitted z-score then min-max transforms."""

    standard: StandardScaling | None
    minmax: MinMaxScaling | None
    fitted_on: str = ""
    columns: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "standard": self.standard.to_dict() if self.standard else None,
            "minmax": self.minmax.to_dict() if self.minmax else None,
            "fitted_on": self.fitted_on,
        }


def _as_matrix(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix[:, None]
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise EmptyDataset("Scaling needs a non-empty 2-D matrix.")
    return matrix


def standardize(
    matrix: np.ndarray,
    params: StandardScaling | None = None,
    columns: Sequence[str] | None = None,
) -> tuple[np.ndarray, StandardScaling]:
    """Z-score each column with the population std.

    Without *params* the transform is fitted on *matrix*; otherwise the
    stored transform is applied unchanged.
    """
    matrix = _as_matrix(matrix)
    if params is None:
        labels = _labels(columns, matrix.shape[1])
        mean = matrix.mean(axis=0)
        std = matrix.std(axis=0)
        for j, label in enumerate(labels):
            if not std[j] > 1e-12 * max(1.0, abs(mean[j])):
                raise ZeroVarianceFeature(label)
        params = StandardScaling(mean, std, labels)
    elif matrix.shape[1] != params.mean.size:
        raise MissingFeature(
            f"Matrix has {matrix.shape[1]} columns, scaling expects {params.mean.size}."
        )
    return (matrix - params.mean) / params.std, params


def normalize(
    matrix: np.ndarray,
    params: MinMaxScaling | None = None,
    columns: Sequence[str] | None = None,
) -> tuple[np.ndarray, MinMaxScaling]:
    """Min-max scale each column to [0, 1].

    Values outside the fitted range are clamped with a warning.
    """
    matrix = _as_matrix(matrix)
    fitting = params is None
    if params is None:
        labels = _labels(columns, matrix.shape[1])
        minimum = matrix.min(axis=0)
        maximum = matrix.max(axis=0)
        for j, label in enumerate(labels):
            if not maximum[j] > minimum[j]:
                raise DegenerateRange(label)
        params = MinMaxScaling(minimum, maximum, labels)
    elif matrix.shape[1] != params.minimum.size:
        raise MissingFeature(
            f"Matrix has {matrix.shape[1]} columns, scaling expects {params.minimum.size}."
        )
    scaled = (matrix - params.minimum) / (params.maximum - params.minimum)
    if not fitting:
        outside = (scaled < 0.0) | (scaled > 1.0)
        if outside.any():
            logger.warning(
                "Clamped %d value(s) outside the fitted range to [0, 1]",
                int(outside.sum()),
            )
            scaled = np.clip(scaled, 0.0, 1.0)
    return scaled, params


def fit_scaling(
    matrix: np.ndarray,
    columns: Sequence[str] | None = None,
    *,
    standardize_features: bool = True,
    normalize_features: bool = True,
) -> tuple[np.ndarray, ScalingParams]:
    """Fit the configured standardize -> normalize chain on *matrix*."""
    matrix = _as_matrix(matrix)
    labels = _labels(columns, matrix.shape[1])
    scaled = matrix
    standard = minmax = None
    if standardize_features:
        scaled, standard = standardize(scaled, columns=labels)
    if normalize_features:
        scaled, minmax = normalize(scaled, columns=labels)
    return scaled, ScalingParams(standard, minmax, _fingerprint(matrix, labels), labels)


def apply_scaling(matrix: np.ndarray, params: ScalingParams) -> np.ndarray:
    scaled = _as_matrix(matrix)
    if params.standard is not None:
        scaled, _ = standardize(scaled, params.standard)
    if params.minmax is not None:
        scaled, _ = normalize(scaled, params.minmax)
    return scaled


# ---------------------------------------------------------------------------
# Splitting and matrices
# ---------------------------------------------------------------------------


def split_indices(
    n: int, test_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded shuffled partition into (train, test) index arrays.

    The test side holds ``ceil(n * test_fraction)`` rows; both index arrays
    are sorted so record order is preserved within each split.
    """
    if not 0.0 < test_fraction < 1.0:
        raise QualityEvaluationError("test_fraction must lie in (0, 1).")
    if n < 2:
        raise EmptyDataset(f"Cannot split {n} record(s) into train and test.")
    # round() absorbs float noise such as 10 * 0.2 = 2.0000000000000004
    n_test = min(math.ceil(round(n * test_fraction, 9)), n - 1)
    order = np.random.default_rng(seed).permutation(n)
    return np.sort(order[n_test:]), np.sort(order[:n_test])


def split_train_test(
    ds: QualityDataset, test_fraction: float = 0.2, seed: int = 0
) -> tuple[QualityDataset, QualityDataset]:
    train_idx, test_idx = split_indices(len(ds), test_fraction, seed)
    return ds.subset(train_idx), ds.subset(test_idx)


def _resolve_features(feature_set: str | Sequence[str]) -> tuple[str, ...]:
    if isinstance(feature_set, str):
        if feature_set not in FEATURE_SETS:
            raise MissingFeature(f"Unknown feature set '{feature_set}'.")
        return FEATURE_SETS[feature_set]
    names = tuple(feature_set)
    if not names:
        raise MissingFeature("Empty feature request.")
    unknown = [n for n in names if n not in COLUMNS[1:] or n == TARGET]
    if unknown:
        raise MissingFeature(f"Unknown feature(s): {', '.join(unknown)}")
    return names


def feature_matrix(
    ds: QualityDataset, feature_set: str | Sequence[str] = "clustering"
) -> tuple[np.ndarray, tuple[str, ...]]:
    """Rows follow record order; columns follow the declared feature order."""
    names = _resolve_features(feature_set)
    matrix = np.column_stack([ds.column(n) for n in names]) if len(ds) else np.empty((0, len(names)))
    if np.isnan(matrix).any():
        bad = [n for j, n in enumerate(names) if np.isnan(matrix[:, j]).any()]
        raise MissingFeature(f"Null values in feature(s) {', '.join(bad)}; drop nulls first.")
    return matrix, names


def target_vector(ds: QualityDataset) -> np.ndarray:
    target = ds.column(TARGET)
    if np.isnan(target).any():
        raise MissingFeature("Null retention_time values; drop nulls first.")
    return target


# ---------------------------------------------------------------------------
# Replicate pairing
# ---------------------------------------------------------------------------

SAMPLE_SHEET_COLUMNS = ("sequence_id", "run1_id", "run2_id", "length", "sulfur_count")


def load_sample_sheet(path: str | Path) -> pd.DataFrame:
    """Read ``sequence_id,run1_id,run2_id,length,sulfur_count[,injection_volume]``."""
    frame = pd.read_csv(
        path, dtype=str, na_values=NULL_MARKERS, keep_default_na=False, skipinitialspace=True
    )
    frame.columns = [c.strip() for c in frame.columns]
    missing = [c for c in SAMPLE_SHEET_COLUMNS if c not in frame.columns]
    if missing:
        raise SchemaMismatch(f"{path}: sample sheet lacks {', '.join(missing)}")
    if "injection_volume" not in frame.columns:
        frame["injection_volume"] = None
    return frame


def _mean(a: float | None, b: float | None) -> float | None:
    if a is None or b is None:
        return None
    return (a + b) / 2.0


def build_quality_table(
    metrics: Mapping[str, PeakMetrics], sheet: pd.DataFrame, name: str = "quality"
) -> QualityDataset:
    """Pair two replicate runs per compound into one :class:`QualityRecord`.

    ``delta_tr`` is run 1 minus run 2; SNR, skewness, area and the target
    retention time are replicate means. A missing run yields null fields.
    """
    records: list[QualityRecord] = []
    for row, values in enumerate(sheet.to_dict(orient="records"), start=1):
        first = metrics.get(str(values["run1_id"]))
        second = metrics.get(str(values["run2_id"]))
        if first is None or second is None:
            logger.warning("Sequence %s: replicate run missing", values["sequence_id"])
        pair = first is not None and second is not None
        records.append(
            QualityRecord(
                sequence_id=str(values["sequence_id"]),
                delta_tr=delta_tr(first.retention_time, second.retention_time) if pair else None,
                snr=_mean(first.snr, second.snr) if pair else None,
                skewness=_mean(first.skewness, second.skewness) if pair else None,
                peak_area=_mean(first.area, second.area) if pair else None,
                length=_parse_cell(values["length"], "length", row),
                sulfur_count=_parse_cell(values["sulfur_count"], "sulfur_count", row),
                injection_volume=_parse_cell(values.get("injection_volume"), "injection_volume", row),
                retention_time=_mean(first.retention_time, second.retention_time) if pair else None,
            )
        )
    return QualityDataset(name, tuple(records))
