"""Principal component analysis by covariance eigendecomposition."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.errors import DimensionMismatch, TooFewSamples, ZeroVarianceFeature

logger = logging.getLogger(__name__)

__all__ = ["PcaModel", "fit_pca", "transform", "choose_components"]

RANK_TOLERANCE = 1e-12


@dataclass(frozen=True, slots=True, eq=False)
class PcaModel:
    """Fitted projection.

    ``components`` rows are orthonormal and ordered by decreasing eigenvalue;
    ``variance_ratios`` covers the retained components and
    ``spectrum_ratios`` the whole fitted space (sums to 1).
    """

    mean_vector: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    variance_ratios: np.ndarray
    spectrum_ratios: np.ndarray
    rank_deficient: bool = False

    @property
    def n_components(self) -> int:
        return int(self.components.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.components.shape[1])

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        return transform(self, matrix)

    def inverse_transform(self, reduced: np.ndarray) -> np.ndarray:
        """Back-project reduced coordinates into feature space."""
        reduced = np.atleast_2d(np.asarray(reduced, dtype=float))
        if reduced.shape[1] != self.n_components:
            raise DimensionMismatch(self.n_components, reduced.shape[1])
        return reduced @ self.components + self.mean_vector

    def to_dict(self) -> dict:
        return {
            "mean": self.mean_vector.tolist(),
            "components": self.components.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "variance_ratios": self.variance_ratios.tolist(),
            "spectrum_ratios": self.spectrum_ratios.tolist(),
            "rank_deficient": self.rank_deficient,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> PcaModel:
        return cls(
            mean_vector=np.asarray(payload["mean"], dtype=float),
            components=np.asarray(payload["components"], dtype=float),
            eigenvalues=np.asarray(payload["eigenvalues"], dtype=float),
            variance_ratios=np.asarray(payload["variance_ratios"], dtype=float),
            spectrum_ratios=np.asarray(payload["spectrum_ratios"], dtype=float),
            rank_deficient=bool(payload.get("rank_deficient", False)),
        )


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each row so its largest-magnitude coordinate is positive."""
    pivots = np.argmax(np.abs(vectors), axis=1)
    signs = np.sign(vectors[np.arange(vectors.shape[0]), pivots])
    signs[signs == 0] = 1.0
    return vectors * signs[:, None]


def choose_components(ratios: Sequence[float] | np.ndarray, threshold: float = 0.8) -> int:
    """Smallest count whose cumulative ratio exceeds *threshold*.

    Returns the full length when no prefix exceeds it.
    """
    cumulative = np.cumsum(np.asarray(ratios, dtype=float))
    above = np.flatnonzero(cumulative > threshold)
    return int(above[0]) + 1 if above.size else int(cumulative.size)


def fit_pca(
    matrix: np.ndarray,
    n_components: int | None = None,
    variance_threshold: float | None = None,
) -> PcaModel:
    """Fit PCA on the sample covariance (``n - 1`` normalisation).

    Give either *n_components* or *variance_threshold*; with neither, every
    component is kept.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise DimensionMismatch(2, matrix.ndim)
    n_samples, n_features = matrix.shape
    if n_samples < 2:
        raise TooFewSamples(f"PCA needs at least 2 samples, got {n_samples}.")

    mean = matrix.mean(axis=0)
    covariance = np.atleast_2d(np.cov(matrix, rowvar=False, ddof=1))
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    vectors = _fix_signs(eigenvectors[:, order].T)

    total = eigenvalues.sum()
    if total <= 0:
        raise ZeroVarianceFeature("all features")
    spectrum = eigenvalues / total

    if n_components is None:
        n_components = (
            choose_components(spectrum, variance_threshold)
            if variance_threshold is not None
            else n_features
        )
    if not 1 <= n_components <= n_features:
        raise DimensionMismatch(n_features, n_components)
    if n_samples <= n_components:
        raise TooFewSamples(
            f"{n_samples} samples cannot support {n_components} components."
        )

    kept = eigenvalues[:n_components]
    rank_deficient = bool(np.any(kept < RANK_TOLERANCE))
    if rank_deficient:
        logger.warning(
            "Retained component(s) with eigenvalue < %g; data are rank deficient",
            RANK_TOLERANCE,
        )
    logger.info(
        "PCA kept %d of %d components (%.1f%% variance)",
        n_components,
        n_features,
        100.0 * spectrum[:n_components].sum(),
    )
    return PcaModel(
        mean_vector=mean,
        components=vectors[:n_components],
        eigenvalues=kept,
        variance_ratios=spectrum[:n_components],
        spectrum_ratios=spectrum,
        rank_deficient=rank_deficient,
    )


def transform(model: PcaModel, matrix: np.ndarray) -> np.ndarray:
    """Project centred rows onto the component rows."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.shape[1] != model.n_features:
        raise DimensionMismatch(model.n_features, matrix.shape[1])
    return (matrix - model.mean_vector) @ model.components.T
