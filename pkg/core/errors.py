"""Domain exceptions.

Every failure the library raises on purpose derives from
``QualityEvaluationError`` which itself is a ``ValueError``, so callers that
only care about "bad input" can keep catching ``ValueError``.
"""

from __future__ import annotations

__all__ = [
    "QualityEvaluationError",
    "InvalidChromatogram",
    "NoPeakFound",
    "InsufficientIdleSamples",
    "ZeroNoise",
    "LevelNotBracketed",
    "SchemaMismatch",
    "ParseError",
    "EmptyDataset",
    "ZeroVarianceFeature",
    "DegenerateRange",
    "MissingFeature",
    "DimensionMismatch",
    "TooFewSamples",
    "SingleCluster",
    "ZeroVarianceTarget",
    "AllCombinationsFailed",
    "ConfigError",
    "PipelineStageError",
    "InsufficientClusterData",
]


class QualityEvaluationError(ValueError):
    """Base class for all domain errors."""


# ---------------------------- signal ----------------------------


class InvalidChromatogram(QualityEvaluationError):
    pass


class NoPeakFound(QualityEvaluationError):
    pass


class InsufficientIdleSamples(QualityEvaluationError):
    def __init__(self, available: int, required: int, where: str = "idle window"):
        super().__init__(
            f"{where} has {available} samples, at least {required} required."
        )
        self.available = available
        self.required = required


class ZeroNoise(QualityEvaluationError):
    pass


class LevelNotBracketed(QualityEvaluationError):
    def __init__(self, side: str, level: float):
        super().__init__(f"Level {level:g} is never crossed on the {side} side.")
        self.side = side
        self.level = level


# ---------------------------- tabular ----------------------------


class SchemaMismatch(QualityEvaluationError):
    pass


class ParseError(QualityEvaluationError):
    def __init__(self, row: int, column: str, value: object, reason: str = ""):
        message = f"Cannot parse row {row}, column '{column}': {value!r}"
        if reason:
            message += f" ({reason})"
        super().__init__(message)
        self.row = row
        self.column = column
        self.value = value


class EmptyDataset(QualityEvaluationError):
    pass


class ZeroVarianceFeature(QualityEvaluationError):
    def __init__(self, column: str):
        super().__init__(f"Feature '{column}' has zero variance.")
        self.column = column


class DegenerateRange(QualityEvaluationError):
    def __init__(self, column: str):
        super().__init__(f"Feature '{column}' has max == min.")
        self.column = column


class MissingFeature(QualityEvaluationError):
    pass


# ---------------------------- reduce / cluster ----------------------------


class DimensionMismatch(QualityEvaluationError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"Expected {expected} features, got {got}.")
        self.expected = expected
        self.got = got


class TooFewSamples(QualityEvaluationError):
    pass


class SingleCluster(QualityEvaluationError):
    pass


# ---------------------------- models ----------------------------


class ZeroVarianceTarget(QualityEvaluationError):
    pass


class AllCombinationsFailed(QualityEvaluationError):
    pass


# ---------------------------- pipeline ----------------------------


class ConfigError(QualityEvaluationError):
    pass


class PipelineStageError(QualityEvaluationError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"Stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


class InsufficientClusterData(QualityEvaluationError):
    def __init__(self, cluster: int, n_train: int, required: int):
        super().__init__(
            f"Cluster {cluster} has {n_train} training rows, {required} required."
        )
        self.cluster = cluster
        self.n_train = n_train
        self.required = required
