"""
High-fidelity corpus types

This module defines the disease classes of the labeled close-up corpus, the
record type for one labeled image and the per-class count summary.
"""

from enum import Enum
from typing import Dict

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class PlantClass(str, Enum):
    """
    Disease label of a high-fidelity image

    Declaration order is the column order of the label table and the row order
    of every confusion matrix:
    - HEALTHY: no visible disease
    - MULTIPLE_DISEASES: more than one disease on the same plant
    - RUST: apple rust
    - SCAB: apple scab
    """
    HEALTHY = "healthy"
    MULTIPLE_DISEASES = "multiple_diseases"
    RUST = "rust"
    SCAB = "scab"

    @classmethod
    def ordered(cls) -> list["PlantClass"]:
        return list(cls)

    @property
    def index(self) -> int:
        return list(PlantClass).index(self)

    @property
    def is_sick(self) -> bool:
        return self is not PlantClass.HEALTHY


LABEL_COLUMNS = tuple(c.value for c in PlantClass)


class HighFidelityRecord(BaseModel):
    """One labeled close-up plant image, referenced by file name"""

    model_config = ConfigDict(frozen=True)

    image_id: str = Field(..., min_length=1)
    label: PlantClass

    @field_validator("image_id")
    @classmethod
    def strip_image_id(cls, v: str) -> str:
        v = v.strip()
        if not v:
            raise ValueError("image_id must be non-empty")
        return v


class ClassDistribution(BaseModel):
    """Number of records per class; every class is present, possibly at zero"""

    model_config = ConfigDict(frozen=True)

    counts: Dict[PlantClass, int]

    @model_validator(mode="before")
    @classmethod
    def fill_missing_classes(cls, data):
        if isinstance(data, dict) and "counts" in data:
            counts = {PlantClass(k): int(v) for k, v in data["counts"].items()}
            for c in PlantClass:
                counts.setdefault(c, 0)
            data = {**data, "counts": counts}
        return data

    @field_validator("counts")
    @classmethod
    def non_negative(cls, v: Dict[PlantClass, int]) -> Dict[PlantClass, int]:
        if any(n < 0 for n in v.values()):
            raise ValueError("class counts must be non-negative")
        return {c: v[c] for c in PlantClass}

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def majority(self) -> int:
        return max(self.counts.values())

    def __getitem__(self, label: PlantClass) -> int:
        return self.counts[PlantClass(label)]

    def as_dict(self) -> Dict[str, int]:
        return {c.value: n for c, n in self.counts.items()}
