"""
Class rebalancing types
"""

from typing import Dict, FrozenSet

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .corpus import PlantClass

ALLOWED_ROTATIONS = frozenset({0, 90, 180, 270})


class BalanceQuota(BaseModel):
    """Number of synthetic images to produce per class"""

    model_config = ConfigDict(frozen=True)

    per_class: Dict[PlantClass, int]

    @model_validator(mode="before")
    @classmethod
    def fill_missing_classes(cls, data):
        if isinstance(data, dict) and "per_class" in data:
            quota = {PlantClass(k): int(v) for k, v in data["per_class"].items()}
            for c in PlantClass:
                quota.setdefault(c, 0)
            data = {**data, "per_class": quota}
        return data

    @field_validator("per_class")
    @classmethod
    def non_negative(cls, v: Dict[PlantClass, int]) -> Dict[PlantClass, int]:
        if any(n < 0 for n in v.values()):
            raise ValueError("quotas must be non-negative")
        return {c: v[c] for c in PlantClass}

    @property
    def total(self) -> int:
        return sum(self.per_class.values())

    def __getitem__(self, label: PlantClass) -> int:
        return self.per_class[PlantClass(label)]

    def as_dict(self) -> Dict[str, int]:
        return {c.value: n for c, n in self.per_class.items()}


class GeneratorConfig(BaseModel):
    """Transforms the built-in classical generator may sample from"""

    model_config = ConfigDict(frozen=True)

    flip: bool = False
    rotate_degrees: FrozenSet[int] = frozenset({0})
    brightness_jitter: float = Field(default=0.0, ge=0, le=0.5)

    @field_validator("rotate_degrees")
    @classmethod
    def check_rotations(cls, v: FrozenSet[int]) -> FrozenSet[int]:
        if not v:
            return frozenset({0})
        if not v <= ALLOWED_ROTATIONS:
            raise ValueError(f"rotations must be a subset of {sorted(ALLOWED_ROTATIONS)}")
        return v

    @property
    def is_identity(self) -> bool:
        return not self.flip and self.rotate_degrees == {0} and self.brightness_jitter == 0
