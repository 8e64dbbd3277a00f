"""
Cutout and CutMix over mosaics

CutMix regions are grid-aligned, so a tile's pixels and its annotation row
always move together and the result is still an exact labeling of the grid.
"""

import logging
from typing import Callable, List, Sequence, Tuple

import numpy as np

from ..exceptions import AlignmentError, IncompatibleSpecError
from ..models.augment import CutMixConfig
from ..models.boxes import TtaTransform
from ..models.mosaic import BBox, MosaicAnnotation, MosaicItem, MosaicSpec
from .seeding import seeded_rng

logger = logging.getLogger(__name__)

DonorSampler = Callable[[np.random.Generator], MosaicItem]


def _row_major(annotations: List[MosaicAnnotation]) -> List[MosaicAnnotation]:
    return sorted(annotations, key=lambda a: (a.bbox[1], a.bbox[0]))


def cutout(item: MosaicItem, region: BBox,
           fill: Tuple[int, int, int] = (0, 0, 0)) -> MosaicItem:
    """Fill ``region`` (clipped to the image) with a constant colour; annotations are kept."""
    x, y, w, h = region
    x0, y0 = max(x, 0), max(y, 0)
    x1, y1 = min(x + w, item.spec.width_px), min(y + h, item.spec.height_px)
    if x1 <= x0 or y1 <= y0:
        return item
    image = item.image.copy()
    image[y0:y1, x0:x1] = np.asarray(fill, dtype=np.uint8)
    return item.model_copy(update={"image": image})


def _check_aligned(region: BBox, spec: MosaicSpec) -> None:
    x, y, w, h = region
    if w < 0 or h < 0:
        raise AlignmentError(f"region {region} has negative size")
    if x % spec.tile_w or w % spec.tile_w or y % spec.tile_h or h % spec.tile_h:
        raise AlignmentError(f"region {region} is not aligned to {spec.tile_w}x{spec.tile_h} tiles")
    if x < 0 or y < 0 or x + w > spec.width_px or y + h > spec.height_px:
        raise AlignmentError(f"region {region} leaves the {spec.width_px}x{spec.height_px} image")


def cutmix(base: MosaicItem, donor: MosaicItem, region: BBox) -> MosaicItem:
    """
    Take the tiles inside ``region`` (pixels and annotations) from ``donor``

    Raises:
        IncompatibleSpecError: the two mosaics have different grids
        AlignmentError: the region does not follow tile boundaries
    """
    if not base.spec.same_geometry(donor.spec):
        raise IncompatibleSpecError("base and donor mosaics have different grid geometry")
    _check_aligned(region, base.spec)
    x, y, w, h = region
    if w == 0 or h == 0:
        return base

    def inside(a: MosaicAnnotation) -> bool:
        ax, ay, _, _ = a.bbox
        return x <= ax < x + w and y <= ay < y + h

    image = base.image.copy()
    image[y:y + h, x:x + w] = donor.image[y:y + h, x:x + w]
    annotations = [a for a in base.annotations if not inside(a)]
    annotations += [a for a in donor.annotations if inside(a)]
    return base.model_copy(update={"image": image, "annotations": _row_major(annotations)})


def sample_region(spec: MosaicSpec, rng: np.random.Generator) -> BBox:
    """Uniform top-left cell and extent in cells, clipped to the grid."""
    row = int(rng.integers(spec.grid_rows))
    col = int(rng.integers(spec.grid_cols))
    cols = int(rng.integers(1, spec.grid_cols + 1))
    rows = int(rng.integers(1, spec.grid_rows + 1))
    cols = min(cols, spec.grid_cols - col)
    rows = min(rows, spec.grid_rows - row)
    return (col * spec.tile_w, row * spec.tile_h, cols * spec.tile_w, rows * spec.tile_h)


def maybe_cutmix(base: MosaicItem, donor_source: DonorSampler, cfg: CutMixConfig,
                 index: int = 0) -> MosaicItem:
    """
    Mix ``base`` with a sampled donor with probability ``cfg.probability``

    The draw uses a stream seeded by ``(cfg.rng_seed, index)``. When no mix
    happens ``base`` itself is returned.
    """
    rng = seeded_rng(cfg.rng_seed, index)
    if rng.random() >= cfg.probability:
        return base
    donor = donor_source(rng)
    region = sample_region(base.spec, rng)
    logger.debug("item %d: cutmix region %s", index, region)
    return cutmix(base, donor, region)


class CutMixDataset:
    """
    Indexable view over mosaics that serves CutMixed items on a random basis

    Item ``i`` is mixed with probability ``cfg.probability`` against a donor
    drawn uniformly from the same collection, then occluded by a grid-aligned
    cutout with probability ``cfg.cutout_probability``.
    """

    def __init__(self, items: Sequence[MosaicItem], cfg: CutMixConfig):
        if not items:
            raise ValueError("CutMixDataset needs at least one mosaic")
        self.items = list(items)
        self.cfg = cfg

    def __len__(self) -> int:
        return len(self.items)

    def _donor(self, rng: np.random.Generator) -> MosaicItem:
        return self.items[int(rng.integers(len(self.items)))]

    def __getitem__(self, index: int) -> MosaicItem:
        item = maybe_cutmix(self.items[index], self._donor, self.cfg, index=index)
        if self.cfg.cutout_probability > 0:
            rng = seeded_rng(self.cfg.rng_seed, index, 1)
            if rng.random() < self.cfg.cutout_probability:
                item = cutout(item, sample_region(item.spec, rng), self.cfg.cutout_fill)
        return item


def transform_mosaic(item: MosaicItem, t: TtaTransform) -> MosaicItem:
    """Flip a mosaic's pixels and mirror its annotation rows to match."""
    width, height = item.spec.width_px, item.spec.height_px
    annotations = []
    for a in item.annotations:
        x, y, w, h = a.bbox
        if t.flips_x:
            x = width - x - w
        if t.flips_y:
            y = height - y - h
        annotations.append(a.model_copy(update={"bbox": (x, y, w, h)}))
    return item.model_copy(update={"image": t.apply(item.image),
                                   "annotations": _row_major(annotations)})
