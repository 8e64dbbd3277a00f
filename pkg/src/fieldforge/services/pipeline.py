"""
Two-step pipeline simulation

For each mosaic the identifier proposes boxes; boxes resolve to grid tiles and
through the annotation rows to the original high-fidelity images; the
classifier diagnoses those images. A sick tile counts as correctly diagnosed
only when it was identified and then classified to its true class.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Any, ContextManager, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ModelInvocationError
from ..models.boxes import ScoredBox, TtaTransform
from ..models.corpus import PlantClass
from ..models.metrics import ConfusionMatrix, Matching
from ..models.mosaic import MosaicAnnotation, MosaicItem
from ..models.pipeline import CandidateCrops, PipelineReport, TileDiagnosis
from .augment import transform_mosaic
from .classifiers import (
    CLASSIFIER_STREAM,
    ClassifierModel,
    OracleClassifier,
)
from .corpus import HighFidelitySample
from .fusion import corner_iou, tta_fuse
from .identifiers import IdentifierModel, OracleIdentifier
from .metrics import (
    accuracy,
    confidence_summary,
    confusion,
    identifier_recall,
    match_detections,
    merge_matchings,
    pipeline_bounds,
)

logger = logging.getLogger(__name__)


def crop_candidates(item: MosaicItem, boxes: Sequence[ScoredBox],
                    iou_threshold: float) -> CandidateCrops:
    """
    Resolve identifier boxes to plant tiles

    Each box goes to the grid cell it overlaps most, provided IoU >=
    ``iou_threshold``; ties go to the first cell in row-major order. Boxes that
    reach no cell, or reach a soil cell, are unresolvable. A tile hit by
    several boxes is listed once, in the order it was first resolved.
    """
    if not 0 < iou_threshold <= 1:
        raise ValueError(f"iou_threshold must lie in (0, 1], got {iou_threshold}")
    spec = item.spec
    by_cell = item.annotation_map()
    seen = set()
    resolved: List[Tuple[MosaicAnnotation, str]] = []
    unresolvable: List[ScoredBox] = []
    for box in boxes:
        x1, y1, x2, y2 = box.corners
        rows = range(max(int(y1 // spec.tile_h), 0), min(int(y2 // spec.tile_h) + 1, spec.grid_rows))
        cols = range(max(int(x1 // spec.tile_w), 0), min(int(x2 // spec.tile_w) + 1, spec.grid_cols))
        best: Optional[Tuple[int, int]] = None
        best_iou = -1.0
        for row in rows:
            for col in cols:
                cell = (col * spec.tile_w, row * spec.tile_h,
                        (col + 1) * spec.tile_w, (row + 1) * spec.tile_h)
                overlap = corner_iou(box.corners, cell)
                if overlap >= iou_threshold and overlap > best_iou:
                    best, best_iou = (row, col), overlap
        annotation = by_cell.get(best) if best is not None else None
        if annotation is None:
            unresolvable.append(box)
        elif best not in seen:
            seen.add(best)
            resolved.append((annotation, annotation.id))
    return CandidateCrops.model_construct(resolved=resolved, unresolvable=unresolvable)


def correlated_oracles(miss_rate: float, error_rate: float, rng_seed: int,
                       truth: Mapping[str, PlantClass]) -> Tuple[OracleIdentifier, OracleClassifier]:
    """
    Oracle pair whose errors are nested

    Both models read the same per-tile hardness draw: the identifier misses a
    sick tile when it falls below ``miss_rate`` and the classifier errs when it
    falls below ``error_rate``. The rarer error is therefore always contained
    in the commoner one, and end-to-end accuracy equals the smaller of the two
    stage accuracies.
    """
    identifier = OracleIdentifier(miss_rate, 0.0, rng_seed, stream=CLASSIFIER_STREAM)
    classifier = OracleClassifier(truth, error_rate, rng_seed, stream=CLASSIFIER_STREAM)
    return identifier, classifier


def _guard(model: Any) -> ContextManager:
    return nullcontext() if getattr(model, "thread_safe", False) else threading.Lock()


@dataclass
class _MosaicOutcome:
    diagnoses: List[TileDiagnosis] = field(default_factory=list)
    matching: Optional[Matching] = None
    unresolvable: int = 0
    classified_truth: List[PlantClass] = field(default_factory=list)
    classified_pred: List[PlantClass] = field(default_factory=list)


class PipelineRunner:
    """
    Runs the identifier and classifier over many mosaics

    Mosaics are processed on ``max_workers`` threads. A model without a truthy
    ``thread_safe`` attribute is called under a lock, so it only ever sees one
    call at a time.
    """

    def __init__(self, identifier: IdentifierModel, classifier: ClassifierModel,
                 catalog: Mapping[str, HighFidelitySample], iou_threshold: float = 0.5,
                 tta: Optional[Sequence[str]] = None, wbf_iou: float = 0.55,
                 max_workers: int = 1):
        self.identifier = identifier
        self.classifier = classifier
        self.catalog = catalog
        self.iou_threshold = iou_threshold
        self.tta = list(tta or [])
        self.wbf_iou = wbf_iou
        self.max_workers = max_workers
        self._identifier_lock = _guard(identifier)
        self._classifier_lock = _guard(classifier)

    def _detect(self, index: int, item: MosaicItem) -> List[ScoredBox]:
        def call(x: MosaicItem) -> List[ScoredBox]:
            with self._identifier_lock:
                return list(self.identifier.detect(x, key=(index,)))

        try:
            if not self.tta:
                return call(item)
            transforms = [TtaTransform(kind=k, image_w=item.spec.width_px,
                                       image_h=item.spec.height_px) for k in self.tta]
            return tta_fuse(call, item, transforms, self.wbf_iou, apply=transform_mosaic)
        except ModelInvocationError as exc:
            exc.context.setdefault("mosaic", index)
            raise
        except Exception as exc:
            raise ModelInvocationError(f"identifier failed: {exc}", {"mosaic": index}) from exc

    def _classify(self, index: int, sample: HighFidelitySample,
                  cell: Tuple[int, int]) -> PlantClass:
        context = {"mosaic": index, "tile": cell, "image_id": sample.image_id}
        try:
            pixels = sample.pixels if getattr(self.classifier, "needs_pixels", True) else None
            with self._classifier_lock:
                probs = self.classifier.classify(pixels, image_id=sample.image_id,
                                                 key=(index, *cell))
        except ModelInvocationError as exc:
            for k, v in context.items():
                exc.context.setdefault(k, v)
            raise
        except Exception as exc:
            raise ModelInvocationError(f"classifier failed: {exc}", context) from exc
        return PlantClass.ordered()[int(np.argmax(probs))]

    def process(self, index: int, item: MosaicItem) -> _MosaicOutcome:
        boxes = self._detect(index, item)
        crops = crop_candidates(item, boxes, self.iou_threshold)
        outcome = _MosaicOutcome(
            matching=match_detections(boxes, item.annotations, self.iou_threshold),
            unresolvable=len(crops.unresolvable),
        )
        identified = {a.cell(item.spec) for a, _ in crops.resolved}
        for annotation in item.annotations:
            cell = annotation.cell(item.spec)
            sample = self.catalog.get(annotation.id)
            if sample is None:
                raise ModelInvocationError("tile source image missing from the catalog",
                                           {"mosaic": index, "tile": cell,
                                            "image_id": annotation.id})
            predicted = None
            if cell in identified:
                predicted = self._classify(index, sample, cell)
                outcome.classified_truth.append(sample.label)
                outcome.classified_pred.append(predicted)
            outcome.diagnoses.append(TileDiagnosis.model_construct(
                mosaic_index=index, bbox=annotation.bbox, image_id=annotation.id,
                true_label=sample.label, identified=cell in identified,
                predicted_label=predicted))
        logger.debug("mosaic %d: %d boxes, %d tiles classified",
                     index, len(boxes), len(outcome.classified_pred))
        return outcome

    def run(self, fields: Sequence[MosaicItem]) -> PipelineReport:
        if not fields:
            raise ValueError("run_pipeline needs at least one mosaic")
        if self.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                outcomes = list(executor.map(self.process, range(len(fields)), fields))
        else:
            outcomes = [self.process(i, item) for i, item in enumerate(fields)]
        return _assemble(outcomes, len(fields))


def _assemble(outcomes: Sequence[_MosaicOutcome], mosaics: int) -> PipelineReport:
    diagnoses = [d for o in outcomes for d in o.diagnoses]
    sick = [d for d in diagnoses if d.sick]
    matching = merge_matchings([o.matching for o in outcomes if o.matching is not None])

    truth = [t for o in outcomes for t in o.classified_truth]
    pred = [p for o in outcomes for p in o.classified_pred]
    classes = PlantClass.ordered()
    if truth:
        cm = confusion(pred, truth, classes)
        classifier_acc = accuracy(cm)
    else:
        cm = ConfusionMatrix(classes=[c.value for c in classes],
                             counts=[[0] * len(classes) for _ in classes])
        classifier_acc = 0.0

    identifier_acc = identifier_recall(matching)
    end_to_end = sum(d.correct for d in sick) / len(sick) if sick else 0.0
    report = PipelineReport(
        mosaics=mosaics,
        sick_tiles=len(sick),
        diagnoses=diagnoses,
        identifier_confidence=confidence_summary(matching),
        identifier_accuracy=identifier_acc,
        classifier_confusion=cm,
        classifier_accuracy=classifier_acc,
        end_to_end_accuracy=end_to_end,
        unresolvable_boxes=sum(o.unresolvable for o in outcomes),
        bounds=pipeline_bounds(identifier_acc, classifier_acc),
    )
    logger.info("pipeline over %d mosaics: end-to-end %.4f (identifier %.4f, classifier %.4f)",
                mosaics, end_to_end, identifier_acc, classifier_acc)
    return report


def run_pipeline(identifier: IdentifierModel, classifier: ClassifierModel,
                 fields: Sequence[MosaicItem], catalog: Mapping[str, HighFidelitySample],
                 iou_threshold: float = 0.5, tta: Optional[Sequence[str]] = None,
                 wbf_iou: float = 0.55, max_workers: int = 1) -> PipelineReport:
    """
    Simulate the identifier-then-classifier flow over ``fields``

    ``catalog`` maps annotation ids to their high-fidelity samples; it supplies
    both the classifier input and the true label. ``tta`` lists transform kinds
    (``identity`` among them) to run the identifier through ``tta_fuse``.

    Raises:
        ValueError: no mosaics
        ModelInvocationError: a model failed; context names the mosaic and tile
    """
    runner = PipelineRunner(identifier, classifier, catalog, iou_threshold=iou_threshold,
                            tta=tta, wbf_iou=wbf_iou, max_workers=max_workers)
    return runner.run(fields)


def catalog_of(samples: Sequence[HighFidelitySample]) -> Dict[str, HighFidelitySample]:
    return {s.image_id: s for s in samples}
