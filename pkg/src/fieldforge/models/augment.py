"""
Mosaic augmentation settings
"""

from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field


class CutMixConfig(BaseModel):
    """
    Per-item CutMix policy

    With ``probability`` an item is mixed with a donor mosaic over a
    grid-aligned rectangle; ``cutout_probability`` optionally occludes a
    random grid-aligned rectangle afterwards.
    """

    model_config = ConfigDict(frozen=True)

    probability: float = Field(default=0.5, ge=0, le=1)
    cutout_probability: float = Field(default=0.0, ge=0, le=1)
    cutout_fill: Tuple[int, int, int] = (0, 0, 0)
    rng_seed: int = 0
