"""
Detection boxes and test-time augmentation transforms
"""

from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ScoredBox(BaseModel):
    """Detection rectangle ``[x1, y1, x2, y2]`` with a confidence and a class id"""

    model_config = ConfigDict(frozen=True)

    corners: Tuple[float, float, float, float]
    score: float = Field(..., ge=0, le=1)
    label: int = 0

    @model_validator(mode="after")
    def check_ordering(self) -> "ScoredBox":
        x1, y1, x2, y2 = self.corners
        if not (x1 < x2 and y1 < y2):
            raise ValueError(f"box corners must satisfy x1<x2 and y1<y2, got {self.corners}")
        return self

    @property
    def area(self) -> float:
        x1, y1, x2, y2 = self.corners
        return (x2 - x1) * (y2 - y1)

    def sort_key(self) -> Tuple[float, float, float, float, float]:
        """Score descending, then corners ascending."""
        return (-self.score, *self.corners)

    def to_json(self) -> dict:
        return {"box": list(self.corners), "score": self.score, "label": self.label}

    @classmethod
    def from_json(cls, payload: dict) -> "ScoredBox":
        return cls(corners=tuple(payload["box"]), score=payload["score"],
                   label=payload.get("label", 0))


class TtaKind(str, Enum):
    """
    Test-time augmentation transform

    All four are involutions, so each transform is its own inverse.
    """
    IDENTITY = "identity"
    HFLIP = "hflip"
    VFLIP = "vflip"
    ROT180 = "rot180"


class TtaTransform(BaseModel):
    """A transform bound to the size of the image it applies to"""

    model_config = ConfigDict(frozen=True)

    kind: TtaKind
    image_w: int = Field(..., gt=0)
    image_h: int = Field(..., gt=0)

    @property
    def flips_x(self) -> bool:
        return self.kind in (TtaKind.HFLIP, TtaKind.ROT180)

    @property
    def flips_y(self) -> bool:
        return self.kind in (TtaKind.VFLIP, TtaKind.ROT180)

    @property
    def inverse(self) -> "TtaTransform":
        return self

    def apply(self, image: np.ndarray) -> np.ndarray:
        """Transform an ``(H, W, ...)`` pixel array."""
        out = image
        if self.flips_x:
            out = out[:, ::-1]
        if self.flips_y:
            out = out[::-1]
        return np.ascontiguousarray(out)

    @classmethod
    def full_set(cls, image_w: int, image_h: int) -> list["TtaTransform"]:
        return [cls(kind=k, image_w=image_w, image_h=image_h) for k in TtaKind]
