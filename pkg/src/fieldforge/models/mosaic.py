"""
Low-fidelity mosaic types

A mosaic is a synthetic far-field image assembled from a grid of tiles. Plant
tiles carry an annotation row; soil tiles carry none.
"""

from typing import Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

BBox = Tuple[int, int, int, int]
"""Pixel rectangle ``(x, y, w, h)`` with the origin at the top-left corner."""


class MosaicSpec(BaseModel):
    """
    Geometry and sampling parameters of one synthetic field image

    The defaults reproduce the reference layout: 1792 x 1204 pixels cut into
    28 x 28 tiles of 64 x 43. Soil cells are drawn independently with
    probability ``soil_parts / (soil_parts + leaf_parts)`` (1:5 gives 1/6)
    unless ``soil_probability_override`` pins it.
    """

    model_config = ConfigDict(frozen=True)

    width_px: int = Field(default=1792, gt=0)
    height_px: int = Field(default=1204, gt=0)
    grid_cols: int = Field(default=28, gt=0)
    grid_rows: int = Field(default=28, gt=0)
    tile_w: int = Field(default=64, gt=0)
    tile_h: int = Field(default=43, gt=0)
    soil_parts: int = Field(default=1, gt=0)
    leaf_parts: int = Field(default=5, gt=0)
    soil_probability_override: Optional[float] = Field(default=None, ge=0, le=1)
    rng_seed: int = 0

    @model_validator(mode="after")
    def check_tiling(self) -> "MosaicSpec":
        if self.grid_cols * self.tile_w != self.width_px:
            raise ValueError(
                f"grid_cols x tile_w = {self.grid_cols * self.tile_w} != width_px {self.width_px}")
        if self.grid_rows * self.tile_h != self.height_px:
            raise ValueError(
                f"grid_rows x tile_h = {self.grid_rows * self.tile_h} != height_px {self.height_px}")
        return self

    @classmethod
    def from_grid(cls, grid_cols: int, grid_rows: int, tile_w: int, tile_h: int,
                  **kwargs) -> "MosaicSpec":
        return cls(width_px=grid_cols * tile_w, height_px=grid_rows * tile_h,
                   grid_cols=grid_cols, grid_rows=grid_rows,
                   tile_w=tile_w, tile_h=tile_h, **kwargs)

    @property
    def soil_probability(self) -> float:
        if self.soil_probability_override is not None:
            return self.soil_probability_override
        return self.soil_parts / (self.soil_parts + self.leaf_parts)

    @property
    def cell_count(self) -> int:
        return self.grid_rows * self.grid_cols

    def same_geometry(self, other: "MosaicSpec") -> bool:
        return (self.width_px, self.height_px, self.grid_cols, self.grid_rows,
                self.tile_w, self.tile_h) == (
            other.width_px, other.height_px, other.grid_cols, other.grid_rows,
            other.tile_w, other.tile_h)

    def cells(self) -> Iterator[Tuple[int, int]]:
        """Yield ``(row, col)`` in row-major order."""
        for row in range(self.grid_rows):
            for col in range(self.grid_cols):
                yield row, col


class MosaicAnnotation(BaseModel):
    """One annotation row: source image id, tile rectangle and sick flag"""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1)
    bbox: BBox
    sick: int = Field(..., ge=0, le=1)

    @property
    def corners(self) -> Tuple[int, int, int, int]:
        x, y, w, h = self.bbox
        return x, y, x + w, y + h

    def cell(self, spec: MosaicSpec) -> Tuple[int, int]:
        x, y, _, _ = self.bbox
        return y // spec.tile_h, x // spec.tile_w


class MosaicItem(BaseModel):
    """
    A rendered mosaic: RGB pixels of shape ``(height_px, width_px, 3)``, the
    annotation rows in row-major grid order, and the spec that produced them
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    image: np.ndarray
    annotations: List[MosaicAnnotation]
    spec: MosaicSpec

    @model_validator(mode="after")
    def check_consistency(self) -> "MosaicItem":
        expected = (self.spec.height_px, self.spec.width_px, 3)
        if self.image.shape != expected:
            raise ValueError(f"image shape {self.image.shape} != {expected}")
        if len(self.annotations) > self.spec.cell_count:
            raise ValueError("more annotations than grid cells")
        return self

    @property
    def soil_count(self) -> int:
        return self.spec.cell_count - len(self.annotations)

    def annotation_map(self) -> dict[Tuple[int, int], MosaicAnnotation]:
        return {a.cell(self.spec): a for a in self.annotations}

    def sick_annotations(self) -> List[MosaicAnnotation]:
        return [a for a in self.annotations if a.sick == 1]
