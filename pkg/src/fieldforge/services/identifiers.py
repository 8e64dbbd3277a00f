"""
Identifier models

An identifier looks at a whole mosaic and proposes boxes around potentially
diseased plants (label 1). ``OracleIdentifier`` reads the mosaic's own
annotations and corrupts them; ``TileHistogramIdentifier`` classifies each
grid tile from its pixels as sick, healthy or soil.
"""

import logging
from typing import List, Protocol, Sequence, runtime_checkable

import numpy as np

from ..exceptions import TrainingError
from ..models.boxes import ScoredBox
from ..models.mosaic import MosaicItem, MosaicSpec
from .classifiers import IDENTIFIER_STREAM, DrawKey, color_histogram, keyed_uniforms, softmax
from .mosaic import cell_bbox

logger = logging.getLogger(__name__)

SICK_LABEL = 1


@runtime_checkable
class IdentifierModel(Protocol):
    """Proposes label-1 boxes inside the bounds of a mosaic"""

    thread_safe: bool

    def detect(self, item: MosaicItem, key: DrawKey = ()) -> List[ScoredBox]: ...


def _cell_box(row: int, col: int, spec: MosaicSpec, score: float) -> ScoredBox:
    x, y, w, h = cell_bbox(row, col, spec)
    return ScoredBox(corners=(float(x), float(y), float(x + w), float(y + h)),
                     score=score, label=SICK_LABEL)


class OracleIdentifier:
    """
    Ground-truth-backed identifier

    Every sick tile is reported with probability ``1 - miss_rate`` and a score
    uniform on [0.5, 1]; every healthy or soil tile is reported with
    probability ``false_alarm_rate`` and a score uniform on [0, 0.5). Draws for
    a tile are keyed by ``(rng_seed, key, row, col)``.
    """

    thread_safe = True

    def __init__(self, miss_rate: float, false_alarm_rate: float, rng_seed: int = 0,
                 stream: int = IDENTIFIER_STREAM):
        for name, rate in (("miss_rate", miss_rate), ("false_alarm_rate", false_alarm_rate)):
            if not 0 <= rate <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {rate}")
        self.miss_rate = miss_rate
        self.false_alarm_rate = false_alarm_rate
        self.rng_seed = rng_seed
        self.stream = stream

    def detect(self, item: MosaicItem, key: DrawKey = ()) -> List[ScoredBox]:
        sick_cells = {a.cell(item.spec) for a in item.sick_annotations()}
        boxes = []
        for row, col in item.spec.cells():
            u_hit, u_score = keyed_uniforms(self.rng_seed, self.stream, (*key, row, col))
            if (row, col) in sick_cells:
                if u_hit >= self.miss_rate:
                    boxes.append(_cell_box(row, col, item.spec, 0.5 + 0.5 * u_score))
            elif u_hit < self.false_alarm_rate:
                boxes.append(_cell_box(row, col, item.spec, 0.5 * u_score))
        return boxes


def oracle_identifier(miss_rate: float, false_alarm_rate: float,
                      rng_seed: int) -> OracleIdentifier:
    return OracleIdentifier(miss_rate, false_alarm_rate, rng_seed)


def tile_features(item: MosaicItem, bins: int = 8) -> np.ndarray:
    """Colour histogram of every cell, row-major, shape ``(cells, 3 * bins)``."""
    spec = item.spec
    tiles = item.image.reshape(spec.grid_rows, spec.tile_h, spec.grid_cols, spec.tile_w, 3)
    tiles = tiles.transpose(0, 2, 1, 3, 4).reshape(spec.cell_count, -1, 3)
    return np.stack([color_histogram(t, bins) for t in tiles])


class TileHistogramIdentifier:
    """
    Per-tile nearest-centroid identifier

    Centroids are kept for three tile kinds in the order sick, healthy, soil.
    A tile is reported when its nearest centroid is the sick one; the score is
    the softmax weight of the sick centroid.
    """

    thread_safe = True
    KINDS = ("sick", "healthy", "soil")

    def __init__(self, centroids: np.ndarray, spec: MosaicSpec, bins: int = 8,
                 temperature: float = 0.05):
        self.centroids = centroids
        self.spec = spec
        self.bins = bins
        self.temperature = temperature

    def detect(self, item: MosaicItem, key: DrawKey = ()) -> List[ScoredBox]:
        features = tile_features(item, self.bins)
        boxes = []
        for k, (row, col) in enumerate(item.spec.cells()):
            distances = np.linalg.norm(self.centroids - features[k], axis=1)
            finite = np.isfinite(distances)
            if not finite[0] or np.argmin(np.where(finite, distances, np.inf)) != 0:
                continue
            probs = softmax(np.where(finite, -distances / self.temperature, -np.inf))
            boxes.append(_cell_box(row, col, item.spec, float(np.clip(probs[0], 0.0, 1.0))))
        return boxes


def train_tile_identifier(mosaics: Sequence[MosaicItem], bins: int = 8,
                          temperature: float = 0.05) -> TileHistogramIdentifier:
    """
    Fit tile centroids from annotated mosaics

    A kind with no example (soil when soil is disabled) gets an unreachable
    centroid.

    Raises:
        TrainingError: no mosaics, mixed geometries, or no sick or no healthy tile
    """
    if not mosaics:
        raise TrainingError("no mosaics to train on")
    spec = mosaics[0].spec
    if any(not m.spec.same_geometry(spec) for m in mosaics):
        raise TrainingError("training mosaics have different grid geometry")
    groups: dict = {kind: [] for kind in TileHistogramIdentifier.KINDS}
    for item in mosaics:
        features = tile_features(item, bins)
        by_cell = item.annotation_map()
        for k, cell in enumerate(spec.cells()):
            a = by_cell.get(cell)
            kind = "soil" if a is None else ("sick" if a.sick else "healthy")
            groups[kind].append(features[k])
    for kind in ("sick", "healthy"):
        if not groups[kind]:
            raise TrainingError(f"no {kind} tiles in the training mosaics")
    centroids = np.stack([
        np.mean(groups[kind], axis=0) if groups[kind] else np.full(3 * bins, np.inf)
        for kind in TileHistogramIdentifier.KINDS
    ])
    logger.info("tile identifier fitted: %s", {k: len(v) for k, v in groups.items()})
    return TileHistogramIdentifier(centroids, spec, bins=bins, temperature=temperature)
