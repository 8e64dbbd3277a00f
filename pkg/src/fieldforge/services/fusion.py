"""
Detection post-processing

Intersection-over-union, greedy non-maximum suppression, weighted boxes
fusion, and test-time augmentation that predicts on flipped copies of an
image, maps the boxes back and fuses them.

Boxes are always processed in ``ScoredBox.sort_key`` order (score descending,
then corners ascending), which makes every function here deterministic.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import BoxBoundsError, ModelInvocationError
from ..models.boxes import ScoredBox, TtaKind, TtaTransform

logger = logging.getLogger(__name__)

Corners = Tuple[float, float, float, float]
DetectionFunction = Callable[[Any], Sequence[ScoredBox]]


def _check_threshold(iou_threshold: float) -> None:
    if not 0 < iou_threshold <= 1:
        raise ValueError(f"iou_threshold must lie in (0, 1], got {iou_threshold}")


def corner_iou(a: Corners, b: Corners) -> float:
    ix = min(a[2], b[2]) - max(a[0], b[0])
    iy = min(a[3], b[3]) - max(a[1], b[1])
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / union if union > 0 else 0.0


def iou(a: ScoredBox, b: ScoredBox) -> float:
    return corner_iou(a.corners, b.corners)


def nms(boxes: Sequence[ScoredBox], iou_threshold: float) -> List[ScoredBox]:
    """Greedy suppression per label; survivors come back score-descending."""
    _check_threshold(iou_threshold)
    kept: List[ScoredBox] = []
    for box in sorted(boxes, key=ScoredBox.sort_key):
        if all(iou(box, k) <= iou_threshold for k in kept if k.label == box.label):
            kept.append(box)
    return kept


class _Cluster:
    def __init__(self, box: ScoredBox):
        self.label = box.label
        self.members: List[ScoredBox] = [box]
        self.fused: Corners = box.corners

    def add(self, box: ScoredBox) -> None:
        self.members.append(box)
        self.fused = _weighted_corners(self.members)

    def mean_score(self) -> float:
        return sum(m.score for m in self.members) / len(self.members)


def _weighted_corners(members: Sequence[ScoredBox]) -> Corners:
    weights = np.array([m.score for m in members], dtype=np.float64)
    if weights.sum() <= 0:
        weights = np.ones_like(weights)
    corners = np.array([m.corners for m in members], dtype=np.float64)
    return tuple(float(v) for v in np.average(corners, axis=0, weights=weights))


def wbf(box_lists: Sequence[Sequence[ScoredBox]], iou_threshold: float,
        source_count: Optional[int] = None,
        skip_box_threshold: float = 0.0) -> List[ScoredBox]:
    """
    Weighted boxes fusion

    Boxes from all lists are pooled and visited in sort order. Each joins the
    same-label cluster whose running fused box overlaps it most with
    IoU >= ``iou_threshold`` (first such cluster on ties), or opens a new one.
    A cluster's corners are the score-weighted mean of its members; its score
    is the mean member score scaled by ``min(size, source_count) / source_count``.

    Boxes scoring below ``skip_box_threshold`` are dropped before clustering.
    """
    _check_threshold(iou_threshold)
    if source_count is None:
        source_count = max(len(box_lists), 1)
    if source_count < len(box_lists) or source_count < 1:
        raise ValueError(f"source_count {source_count} is below the {len(box_lists)} input lists")

    pooled = [b for boxes in box_lists for b in boxes if b.score >= skip_box_threshold]
    clusters: List[_Cluster] = []
    for box in sorted(pooled, key=ScoredBox.sort_key):
        best: Optional[_Cluster] = None
        best_iou = -1.0
        for cluster in clusters:
            if cluster.label != box.label:
                continue
            overlap = corner_iou(box.corners, cluster.fused)
            if overlap >= iou_threshold and overlap > best_iou:
                best, best_iou = cluster, overlap
        if best is None:
            clusters.append(_Cluster(box))
        else:
            best.add(box)

    fused = [
        ScoredBox(corners=c.fused,
                  score=c.mean_score() * min(len(c.members), source_count) / source_count,
                  label=c.label)
        for c in clusters
    ]
    return sorted(fused, key=ScoredBox.sort_key)


def transform_boxes(boxes: Sequence[ScoredBox], t: TtaTransform) -> List[ScoredBox]:
    """
    Map boxes through a flip; scores and labels are unchanged

    Raises:
        BoxBoundsError: a box leaves ``[0, image_w] x [0, image_h]``
    """
    out = []
    for box in boxes:
        x1, y1, x2, y2 = box.corners
        if x1 < 0 or y1 < 0 or x2 > t.image_w or y2 > t.image_h:
            raise BoxBoundsError(
                f"box {box.corners} outside {t.image_w}x{t.image_h} image")
        if t.flips_x:
            x1, x2 = t.image_w - x2, t.image_w - x1
        if t.flips_y:
            y1, y2 = t.image_h - y2, t.image_h - y1
        out.append(box.model_copy(update={"corners": (x1, y1, x2, y2)}))
    return out


def _pixels_of(image: Any) -> np.ndarray:
    return getattr(image, "image", image)


def _apply_pixels(image: np.ndarray, t: TtaTransform) -> np.ndarray:
    return t.apply(image)


def tta_fuse(model: DetectionFunction, image: Any, transforms: Sequence[TtaTransform],
             iou_threshold: float, skip_box_threshold: float = 0.0,
             max_workers: int = 1,
             apply: Optional[Callable[[Any, TtaTransform], Any]] = None) -> List[ScoredBox]:
    """
    Predict on every transformed copy of ``image`` and fuse the mapped-back boxes

    ``image`` is a pixel array by default. Pass ``apply`` to transform richer
    inputs (for example a whole mosaic with its annotations); the input must
    then expose its pixels as ``.image``.

    Transforms run concurrently only when ``max_workers > 1`` and the model
    exposes a truthy ``thread_safe`` attribute.

    Raises:
        ValueError: empty transform list or no identity transform
        ModelInvocationError: the model failed; context names the transform
    """
    if not transforms:
        raise ValueError("tta_fuse needs at least one transform")
    if not any(t.kind is TtaKind.IDENTITY for t in transforms):
        raise ValueError("tta_fuse transforms must include identity")
    height, width = _pixels_of(image).shape[:2]
    for t in transforms:
        if (t.image_w, t.image_h) != (width, height):
            raise ValueError(f"transform sized {t.image_w}x{t.image_h} for a {width}x{height} image")
    transform = apply or _apply_pixels

    def run(t: TtaTransform) -> List[ScoredBox]:
        try:
            predicted = list(model(transform(image, t)))
        except ModelInvocationError as exc:
            exc.context.setdefault("transform", t.kind.value)
            raise
        except Exception as exc:
            raise ModelInvocationError(f"detection failed: {exc}",
                                       {"transform": t.kind.value}) from exc
        return transform_boxes(predicted, t.inverse)

    if max_workers > 1 and getattr(model, "thread_safe", False):
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            lists = list(executor.map(run, transforms))
    else:
        lists = [run(t) for t in transforms]

    logger.debug("tta: %s boxes per transform", [len(b) for b in lists])
    return wbf(lists, iou_threshold, source_count=len(transforms),
               skip_box_threshold=skip_box_threshold)
