"""
Evaluation types: confusion matrices, per-class scores, detection matchings
and composed pipeline accuracy bounds
"""

from enum import Enum
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .boxes import ScoredBox
from .mosaic import MosaicAnnotation


class SupportMode(str, Enum):
    """
    How per-class support is counted

    - PREDICTED: number of samples predicted as the class (column sum)
    - ACTUAL: number of samples truly in the class (row sum)
    """
    PREDICTED = "predicted"
    ACTUAL = "actual"


class ConfusionMatrix(BaseModel):
    """Square count matrix; entry ``counts[i][j]`` is actual ``i`` predicted ``j``"""

    model_config = ConfigDict(frozen=True)

    classes: List[str]
    counts: List[List[int]]

    @model_validator(mode="after")
    def check_square(self) -> "ConfusionMatrix":
        n = len(self.classes)
        if len(set(self.classes)) != n:
            raise ValueError("class labels must be unique")
        if len(self.counts) != n or any(len(row) != n for row in self.counts):
            raise ValueError(f"counts must be {n}x{n}")
        if any(v < 0 for row in self.counts for v in row):
            raise ValueError("counts must be non-negative")
        return self

    def array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64).reshape(len(self.classes), len(self.classes))

    @property
    def total(self) -> int:
        return int(self.array().sum())

    @property
    def trace(self) -> int:
        return int(np.trace(self.array()))


class ClassScores(BaseModel):
    model_config = ConfigDict(frozen=True)

    precision: float = Field(..., ge=0, le=1)
    recall: float = Field(..., ge=0, le=1)
    f1: float = Field(..., ge=0, le=1)
    support: int = Field(..., ge=0)


class ClassMetrics(BaseModel):
    """Per-class scores plus macro and support-weighted averages"""

    model_config = ConfigDict(frozen=True)

    per_class: Dict[str, ClassScores]
    macro: ClassScores
    weighted: ClassScores
    support_mode: SupportMode = SupportMode.PREDICTED

    def __getitem__(self, label: str) -> ClassScores:
        return self.per_class[str(getattr(label, "value", label))]


class PipelineAccuracyBounds(BaseModel):
    """Composed two-step accuracy: independence estimate and Frechet bounds"""

    model_config = ConfigDict(frozen=True)

    independent_estimate: float = Field(..., ge=0, le=1)
    lower_bound: float = Field(..., ge=0, le=1)
    upper_bound: float = Field(..., ge=0, le=1)

    @model_validator(mode="after")
    def check_order(self) -> "PipelineAccuracyBounds":
        if not self.lower_bound <= self.independent_estimate <= self.upper_bound:
            raise ValueError("bounds must satisfy lower <= independent <= upper")
        return self


class ConfidenceSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    avg_positive_confidence: float = Field(..., ge=0, le=1)
    avg_negative_confidence: float = Field(..., ge=0, le=1)
    matched: int = Field(..., ge=0)
    unmatched: int = Field(..., ge=0)


class Matching(BaseModel):
    """One-to-one assignment of predicted boxes to sick ground-truth tiles"""

    model_config = ConfigDict(frozen=True)

    pairs: List[Tuple[ScoredBox, MosaicAnnotation]]
    unmatched_preds: List[ScoredBox]
    unmatched_truth: List[MosaicAnnotation]

    @field_validator("pairs")
    @classmethod
    def one_to_one(cls, v):
        seen = [truth for _, truth in v]
        if len({(t.id, t.bbox) for t in seen}) != len(seen):
            raise ValueError("a truth tile is matched twice")
        return v

    @property
    def truth_count(self) -> int:
        return len(self.pairs) + len(self.unmatched_truth)
