"""Pipeline configuration file: a TOML document validated by pydantic models.

Unknown keys are rejected everywhere. Grid values may be given either as an
explicit list or as ``{linspace = [start, stop, count]}``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import tomllib
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from core.errors import ConfigError
from services.tabular import FEATURES

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_GB_GRID",
    "DEFAULT_SVR_GRID",
    "PipelineConfig",
    "load_config",
    "expand_grid",
]


def _linspace(start: float, stop: float, count: int) -> list[float]:
    return [float(v) for v in np.linspace(start, stop, int(count))]


DEFAULT_GB_GRID: dict[str, list[Any]] = {
    "max_depth": [5, 10, 15, 20, 50],
    "learning_rate": [0.001, 0.01, 0.1, 0.2],
    "n_estimators": [100, 500, 1000],
    "max_leaf_nodes": [2, 5, 10],
}
DEFAULT_SVR_GRID: dict[str, list[Any]] = {
    "C": _linspace(1.0, 1000.0, 50),
    "gamma": [0.1, 0.01, 0.001],
    "epsilon": _linspace(1e-4, 2e-4, 10),
    "kernel": ["rbf"],
}


def expand_grid(raw: dict[str, Any]) -> dict[str, list[Any]]:
    """Turn ``{linspace = [a, b, n]}`` entries into explicit value lists."""
    grid: dict[str, list[Any]] = {}
    for name, spec in raw.items():
        if isinstance(spec, dict):
            if set(spec) != {"linspace"} or len(spec["linspace"]) != 3:
                raise ValueError(f"grid entry '{name}' must be a list or {{linspace = [start, stop, count]}}")
            grid[name] = _linspace(*spec["linspace"])
        elif isinstance(spec, list):
            if not spec:
                raise ValueError(f"grid entry '{name}' is empty")
            grid[name] = list(spec)
        else:
            grid[name] = [spec]
    return grid


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# ---------------------------- dataset ----------------------------


class TierSpec(_Section):
    """Normal draws (mean, std) per quality measurement of one planted tier."""

    name: str
    rows: int = Field(300, ge=1)
    snr: tuple[float, float]
    skewness: tuple[float, float]
    delta_tr: tuple[float, float]
    peak_area: tuple[float, float]
    target_noise: float = Field(ge=0)


class SyntheticDatasetConfig(_Section):
    tiers: list[TierSpec] = Field(min_length=1)
    length_mean: float = 16.0
    length_std: float = 2.5
    length_min: int = Field(8, ge=1)
    length_max: int = 25
    sulfur_probability: float = Field(0.5, ge=0, le=1)


class DatasetConfig(_Section):
    name: str = "dataset"
    path: Path | None = None
    synthetic: SyntheticDatasetConfig | None = None

    @model_validator(mode="after")
    def _one_source(self) -> DatasetConfig:
        if (self.path is None) == (self.synthetic is None):
            raise ValueError("dataset needs exactly one of 'path' or 'synthetic'")
        return self


# ---------------------------- stages ----------------------------


class FeaturesConfig(_Section):
    clustering: list[str] = Field(default_factory=lambda: list(FEATURES), min_length=1)
    regression: list[str] = Field(default_factory=lambda: list(FEATURES), min_length=1)

    @field_validator("clustering", "regression")
    @classmethod
    def _known(cls, names: list[str]) -> list[str]:
        unknown = [n for n in names if n not in FEATURES]
        if unknown:
            raise ValueError(f"unknown feature(s): {', '.join(unknown)}")
        return names


class ScalingConfig(_Section):
    standardize: bool = True
    normalize: bool = True


class SplitConfig(_Section):
    test_fraction: float = Field(0.2, gt=0, lt=1)


class PcaConfig(_Section):
    n_components: int | None = Field(None, ge=1)
    variance_threshold: float = Field(0.8, gt=0, le=1)
    cluster_space: Literal["pca", "scaled"] = "pca"


class ClusteringConfig(_Section):
    k_min: int = Field(1, ge=1)
    k_max: int = Field(10, ge=1)
    k: int | None = Field(None, ge=1)
    n_init: int = Field(10, ge=1)
    max_iter: int = Field(300, ge=1)
    tol: float = Field(1e-6, gt=0)

    @model_validator(mode="after")
    def _range(self) -> ClusteringConfig:
        if self.k_max < self.k_min:
            raise ValueError("k_max must be >= k_min")
        return self


class ModelConfig(_Section):
    family: Literal["gb", "svr", "both"] = "gb"
    folds: int = Field(5, ge=2)
    share_tuning: bool = False
    gb_grid: dict[str, Any] = Field(default_factory=lambda: dict(DEFAULT_GB_GRID))
    svr_grid: dict[str, Any] = Field(default_factory=lambda: dict(DEFAULT_SVR_GRID))

    @field_validator("gb_grid", "svr_grid")
    @classmethod
    def _expand(cls, raw: dict[str, Any]) -> dict[str, list[Any]]:
        return expand_grid(raw)

    @field_validator("gb_grid")
    @classmethod
    def _gb_keys(cls, grid: dict[str, list[Any]]) -> dict[str, list[Any]]:
        unknown = set(grid) - set(DEFAULT_GB_GRID)
        if unknown:
            raise ValueError(f"unknown gb_grid key(s): {', '.join(sorted(unknown))}")
        return grid

    @field_validator("svr_grid")
    @classmethod
    def _svr_keys(cls, grid: dict[str, list[Any]]) -> dict[str, list[Any]]:
        unknown = set(grid) - set(DEFAULT_SVR_GRID)
        if unknown:
            raise ValueError(f"unknown svr_grid key(s): {', '.join(sorted(unknown))}")
        return grid

    def families(self) -> list[str]:
        return ["gb", "svr"] if self.family == "both" else [self.family]

    def grid_for(self, family: str) -> dict[str, list[Any]]:
        return self.gb_grid if family == "gb" else self.svr_grid

    @property
    def min_cluster_rows(self) -> int:
        return max(10, self.folds)


# ---------------------------- chromatograms ----------------------------


class PeakWindowConfig(_Section):
    search_window: tuple[float, float]
    idle_window: tuple[float, float] | None = None
    fraction: float = Field(0.5, gt=0, lt=1)
    flank_size: int = Field(10, ge=5)


class PeakSpecConfig(_Section):
    apex_time: float
    amplitude: float = Field(gt=0)
    sigma: float = Field(gt=0)
    tau: float = Field(0.0, ge=0)
    baseline_offset: float = 0.0
    baseline_slope: float = 0.0
    noise_sigma: float = Field(0.0, ge=0)
    rng_seed: int = 0


class ChromatogramConfig(_Section):
    id: str
    duration: float = Field(gt=0)
    sample_rate: float = Field(gt=0)
    peaks: list[PeakSpecConfig] = Field(default_factory=list)
    baseline_offset: float = 0.0
    baseline_slope: float = 0.0
    noise_sigma: float = Field(0.0, ge=0)


# ---------------------------- root ----------------------------


class PipelineConfig(_Section):
    seed: int
    output_dir: Path = Path("out")
    dataset: DatasetConfig
    features: FeaturesConfig = FeaturesConfig()
    scaling: ScalingConfig = ScalingConfig()
    split: SplitConfig = SplitConfig()
    pca: PcaConfig = PcaConfig()
    clustering: ClusteringConfig = ClusteringConfig()
    model: ModelConfig = ModelConfig()
    peaks: PeakWindowConfig | None = None
    chromatograms: list[ChromatogramConfig] = Field(default_factory=list)

    def with_overrides(
        self, seed: int | None = None, output_dir: str | Path | None = None
    ) -> PipelineConfig:
        """Return a copy with CLI ``--seed`` / ``--out`` applied."""
        update: dict[str, Any] = {}
        if seed is not None:
            update["seed"] = seed
        if output_dir is not None:
            update["output_dir"] = Path(output_dir)
        return self.model_copy(update=update) if update else self

    def config_hash(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def check_paths(self) -> None:
        """Raise ``ConfigError`` when a referenced input file is missing."""
        path = self.dataset.path
        if path is not None and not path.is_file():
            raise ConfigError(f"dataset.path does not exist: {path}")


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        key = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{key}: {item['msg']}")
    return "; ".join(parts)


def load_config(path: str | Path, base_dir: Path | None = None) -> PipelineConfig:
    """Read and validate a TOML pipeline config.

    Relative ``dataset.path`` values resolve against the config file's folder.
    """
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML ({exc})") from None

    base = base_dir or path.parent
    dataset = raw.get("dataset")
    if isinstance(dataset, dict) and isinstance(dataset.get("path"), str):
        candidate = Path(dataset["path"])
        if not candidate.is_absolute():
            dataset["path"] = str(base / candidate)
    try:
        config = PipelineConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {_describe(exc)}") from None
    logger.info("Loaded config %s (hash %s)", path, config.config_hash()[:12])
    return config
