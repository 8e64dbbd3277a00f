"""
Low-fidelity mosaic generation

Assembles high-fidelity tiles and soil patches into a synthetic far-field
image plus its per-tile annotation table. Every random decision is drawn up
front by ``plan_layout`` from the spec's seed, so the same spec and pool always
yield byte-identical output.
"""

import csv
import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import GridBoundsError, LabelParseError, NoSourceError, TextureError
from ..models.mosaic import BBox, MosaicAnnotation, MosaicItem, MosaicSpec
from .corpus import HighFidelitySample, binarize
from .imaging import load_image, resize, save_png
from .seeding import seed_sequence, seeded_rng

logger = logging.getLogger(__name__)

ANNOTATION_HEADER = ("id", "bbox", "class label")


def cell_bbox(row: int, col: int, spec: MosaicSpec) -> BBox:
    if not (0 <= row < spec.grid_rows and 0 <= col < spec.grid_cols):
        raise GridBoundsError(
            f"cell ({row}, {col}) outside {spec.grid_rows}x{spec.grid_cols} grid")
    return (col * spec.tile_w, row * spec.tile_h, spec.tile_w, spec.tile_h)


def mosaic_seed(seed: int, index: int) -> int:
    """Independent per-mosaic seed for batch generation."""
    return int(seed_sequence(seed, index).generate_state(1)[0])


@dataclass(frozen=True)
class LayoutPlan:
    """Row-major per-cell draws: soil flag, pool index, soil slice origin"""

    soil: np.ndarray
    source: np.ndarray
    soil_y: np.ndarray
    soil_x: np.ndarray

    @property
    def soil_fraction(self) -> float:
        return float(self.soil.mean()) if self.soil.size else 0.0


def plan_layout(spec: MosaicSpec, pool_size: int,
                soil_shape: Optional[Tuple[int, int]] = None) -> LayoutPlan:
    """
    Draw every random choice of one mosaic

    Each cell is soil independently with ``spec.soil_probability``; plant cells
    pick a pool index uniformly with replacement; soil cells pick a tile-sized
    slice origin inside a texture of ``soil_shape`` (height, width).
    """
    if pool_size <= 0:
        raise NoSourceError("mosaic source pool is empty")
    soil_h, soil_w = soil_shape or (spec.tile_h, spec.tile_w)
    n = spec.cell_count
    rng = seeded_rng(spec.rng_seed)
    soil = rng.random(n) < spec.soil_probability
    source = rng.integers(0, pool_size, size=n)
    soil_y = rng.integers(0, soil_h - spec.tile_h + 1, size=n)
    soil_x = rng.integers(0, soil_w - spec.tile_w + 1, size=n)
    return LayoutPlan(soil=soil, source=source, soil_y=soil_y, soil_x=soil_x)


def generate_mosaic(pool: Sequence[HighFidelitySample], soil_texture: np.ndarray,
                    spec: MosaicSpec) -> MosaicItem:
    """
    Render one mosaic and its annotations

    Raises:
        NoSourceError: the pool is empty
        TextureError: the soil texture is smaller than one tile
    """
    if not pool:
        raise NoSourceError("mosaic source pool is empty")
    if soil_texture.ndim != 3 or soil_texture.shape[0] < spec.tile_h \
            or soil_texture.shape[1] < spec.tile_w:
        raise TextureError(
            f"soil texture {soil_texture.shape[:2]} smaller than tile "
            f"{spec.tile_h}x{spec.tile_w}")

    plan = plan_layout(spec, len(pool), soil_texture.shape[:2])
    image = np.zeros((spec.height_px, spec.width_px, 3), dtype=np.uint8)
    annotations: List[MosaicAnnotation] = []
    tiles: Dict[int, np.ndarray] = {}

    for k, (row, col) in enumerate(spec.cells()):
        x, y, w, h = cell_bbox(row, col, spec)
        if plan.soil[k]:
            sy, sx = int(plan.soil_y[k]), int(plan.soil_x[k])
            image[y:y + h, x:x + w] = soil_texture[sy:sy + h, sx:sx + w, :3]
            continue
        idx = int(plan.source[k])
        if idx not in tiles:
            tiles[idx] = resize(pool[idx].pixels, spec.tile_w, spec.tile_h)
        image[y:y + h, x:x + w] = tiles[idx]
        annotations.append(MosaicAnnotation(
            id=pool[idx].image_id, bbox=(x, y, w, h), sick=binarize(pool[idx].record)))

    logger.debug("mosaic seed=%d: %d plant / %d soil tiles",
                 spec.rng_seed, len(annotations), spec.cell_count - len(annotations))
    return MosaicItem(image=image, annotations=annotations, spec=spec)


def write_annotations(annotations: Sequence[MosaicAnnotation]) -> str:
    """
    Serialize annotation rows

    ``bbox`` is written as ``"[x, y, w, h]"``; the csv writer quotes it because
    it contains commas.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ANNOTATION_HEADER)
    for a in annotations:
        writer.writerow([a.id, "[" + ", ".join(str(v) for v in a.bbox) + "]", a.sick])
    return buf.getvalue()


def parse_annotations(raw: str) -> List[MosaicAnnotation]:
    reader = csv.reader(io.StringIO(raw.lstrip("\ufeff"), newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise LabelParseError("empty annotation table", line=1) from None
    if tuple(h.strip() for h in header) != ANNOTATION_HEADER:
        raise LabelParseError(f"unexpected annotation header {header!r}", line=1)
    annotations = []
    for row in reader:
        if not row:
            continue
        if len(row) != 3:
            raise LabelParseError(f"expected 3 columns, got {len(row)}", line=reader.line_num)
        try:
            bbox = json.loads(row[1])
            annotations.append(MosaicAnnotation(id=row[0], bbox=tuple(bbox), sick=int(row[2])))
        except (ValueError, TypeError) as exc:
            raise LabelParseError(str(exc), line=reader.line_num) from exc
    return annotations


def write_mosaic(item: MosaicItem, out_dir: Union[str, Path],
                 stem: str) -> Tuple[Path, Path]:
    """Write ``<stem>.png`` and ``<stem>.csv`` into ``out_dir``."""
    out_dir = Path(out_dir)
    png = save_png(item.image, out_dir / f"{stem}.png")
    csv_path = out_dir / f"{stem}.csv"
    csv_path.write_text(write_annotations(item.annotations), encoding="utf-8", newline="")
    logger.info("wrote %s (+ .csv, %d annotations)", png, len(item.annotations))
    return png, csv_path


def read_mosaic(png: Union[str, Path], csv_path: Union[str, Path],
                spec: Optional[MosaicSpec] = None) -> MosaicItem:
    """Load a PNG+CSV pair; the spec defaults to the reference geometry."""
    image = load_image(png)
    annotations = parse_annotations(Path(csv_path).read_text(encoding="utf-8"))
    return MosaicItem(image=image, annotations=annotations, spec=spec or MosaicSpec())


def list_mosaic_pairs(directory: Union[str, Path]) -> List[Tuple[Path, Path]]:
    """PNG+CSV pairs in a directory, sorted by stem."""
    directory = Path(directory)
    pairs = []
    for png in sorted(directory.glob("*.png")):
        csv_path = png.with_suffix(".csv")
        if csv_path.is_file():
            pairs.append((png, csv_path))
    return pairs
