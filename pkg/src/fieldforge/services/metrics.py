"""
Classifier and identifier evaluation

Empty denominators yield 0 instead of raising, so batch evaluation over many
mosaics never aborts on a degenerate slice. Only ``accuracy`` on an empty
matrix and malformed inputs raise.
"""

import logging
from typing import Dict, Hashable, List, Optional, Sequence

import numpy as np

from ..exceptions import EmptyMatrixError, MetricInputError
from ..models.boxes import ScoredBox
from ..models.metrics import (
    ClassMetrics,
    ClassScores,
    ConfidenceSummary,
    ConfusionMatrix,
    Matching,
    PipelineAccuracyBounds,
    SupportMode,
)
from ..models.mosaic import MosaicAnnotation
from .fusion import corner_iou

logger = logging.getLogger(__name__)


def _label_name(label: Hashable) -> str:
    return str(getattr(label, "value", label))


def confusion(pred: Sequence[Hashable], truth: Sequence[Hashable],
              classes: Sequence[Hashable]) -> ConfusionMatrix:
    """
    Count ``(actual, predicted)`` pairs

    Raises:
        MetricInputError: empty input, length mismatch or a label outside ``classes``
    """
    if len(pred) != len(truth):
        raise MetricInputError(f"{len(pred)} predictions for {len(truth)} ground-truth labels")
    if not pred:
        raise MetricInputError("no predictions to evaluate")
    names = [_label_name(c) for c in classes]
    index = {name: i for i, name in enumerate(names)}
    counts = np.zeros((len(names), len(names)), dtype=np.int64)
    for k, (p, t) in enumerate(zip(pred, truth)):
        pi, ti = index.get(_label_name(p)), index.get(_label_name(t))
        if pi is None or ti is None:
            raise MetricInputError(f"sample {k}: label outside {names} ({t!r} -> {p!r})")
        counts[ti, pi] += 1
    return ConfusionMatrix(classes=names, counts=counts.tolist())


def accuracy(cm: ConfusionMatrix) -> float:
    total = cm.total
    if total == 0:
        raise EmptyMatrixError("accuracy of an empty confusion matrix")
    return cm.trace / total


def _ratio(num: float, den: float) -> float:
    return float(num / den) if den > 0 else 0.0


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def per_class_metrics(cm: ConfusionMatrix,
                      support_mode: SupportMode = SupportMode.PREDICTED) -> ClassMetrics:
    """
    Precision, recall, F1 and support per class

    ``precision_j`` divides the diagonal by column ``j`` (predicted as ``j``),
    ``recall_i`` by row ``i`` (actually ``i``). Support is the predicted count
    by default; ``SupportMode.ACTUAL`` gives the conventional row count.
    Macro averages are unweighted; weighted averages use the chosen support.
    """
    counts = cm.array()
    diag = np.diag(counts)
    col = counts.sum(axis=0)
    row = counts.sum(axis=1)
    support = col if support_mode is SupportMode.PREDICTED else row

    per_class: Dict[str, ClassScores] = {}
    for j, name in enumerate(cm.classes):
        p = _ratio(diag[j], col[j])
        r = _ratio(diag[j], row[j])
        per_class[name] = ClassScores(precision=p, recall=r, f1=_f1(p, r), support=int(support[j]))

    scores = list(per_class.values())
    n = len(scores)
    macro = ClassScores(
        precision=sum(s.precision for s in scores) / n,
        recall=sum(s.recall for s in scores) / n,
        f1=sum(s.f1 for s in scores) / n,
        support=int(support.sum()),
    )
    total_support = int(support.sum())
    weighted = ClassScores(
        precision=_ratio(sum(s.precision * s.support for s in scores), total_support),
        recall=_ratio(sum(s.recall * s.support for s in scores), total_support),
        f1=_ratio(sum(s.f1 * s.support for s in scores), total_support),
        support=total_support,
    )
    return ClassMetrics(per_class=per_class, macro=macro, weighted=weighted,
                        support_mode=support_mode)


def match_detections(preds: Sequence[ScoredBox], truth: Sequence[MosaicAnnotation],
                     iou_threshold: float) -> Matching:
    """
    Greedy one-to-one matching of predictions to sick tiles

    Predictions are visited by descending score; each takes the unmatched sick
    tile it overlaps most, provided IoU >= ``iou_threshold``. Healthy tiles are
    never matched.
    """
    if not 0 < iou_threshold <= 1:
        raise ValueError(f"iou_threshold must lie in (0, 1], got {iou_threshold}")
    sick = [t for t in truth if t.sick == 1]
    taken = [False] * len(sick)
    pairs = []
    unmatched_preds: List[ScoredBox] = []
    for pred in sorted(preds, key=ScoredBox.sort_key):
        best, best_iou = -1, -1.0
        for k, t in enumerate(sick):
            if taken[k]:
                continue
            overlap = corner_iou(pred.corners, t.corners)
            if overlap >= iou_threshold and overlap > best_iou:
                best, best_iou = k, overlap
        if best < 0:
            unmatched_preds.append(pred)
        else:
            taken[best] = True
            pairs.append((pred, sick[best]))
    unmatched_truth = [t for k, t in enumerate(sick) if not taken[k]]
    return Matching(pairs=pairs, unmatched_preds=unmatched_preds, unmatched_truth=unmatched_truth)


def merge_matchings(matchings: Sequence[Matching]) -> Matching:
    """Concatenate matchings from different mosaics."""
    return Matching.model_construct(
        pairs=[p for m in matchings for p in m.pairs],
        unmatched_preds=[p for m in matchings for p in m.unmatched_preds],
        unmatched_truth=[t for m in matchings for t in m.unmatched_truth],
    )


def confidence_summary(matching: Matching) -> ConfidenceSummary:
    positive = [pred.score for pred, _ in matching.pairs]
    negative = [pred.score for pred in matching.unmatched_preds]
    return ConfidenceSummary(
        avg_positive_confidence=float(np.mean(positive)) if positive else 0.0,
        avg_negative_confidence=float(np.mean(negative)) if negative else 0.0,
        matched=len(positive),
        unmatched=len(negative),
    )


def identifier_recall(matching: Matching) -> float:
    """Share of sick tiles matched by some prediction."""
    return _ratio(len(matching.pairs), matching.truth_count)


def pipeline_bounds(identifier_acc: float, classifier_acc: float) -> PipelineAccuracyBounds:
    """
    Compose two stage accuracies

    Independent errors give the product; fully overlapping errors give the
    smaller accuracy; fully disjoint errors give ``max(0, a + b - 1)``.
    """
    for name, value in (("identifier_acc", identifier_acc), ("classifier_acc", classifier_acc)):
        if not 0 <= value <= 1:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
    independent = identifier_acc * classifier_acc
    upper = min(identifier_acc, classifier_acc)
    lower = max(0.0, 1.0 - (1.0 - identifier_acc) - (1.0 - classifier_acc))
    # rounding in the subtraction may nudge lower past the product
    lower = min(lower, independent)
    return PipelineAccuracyBounds(independent_estimate=independent,
                                  lower_bound=lower, upper_bound=upper)


def evaluation_report(cm: ConfusionMatrix,
                      support_mode: SupportMode = SupportMode.PREDICTED,
                      matching: Optional[Matching] = None,
                      identifier_acc: Optional[float] = None) -> dict:
    """
    JSON-ready report with ``confusion``, ``per_class``, ``accuracy`` and,
    when identifier results are supplied, ``confidence`` and ``bounds``
    """
    acc = accuracy(cm)
    metrics = per_class_metrics(cm, support_mode)
    report: dict = {
        "confusion": cm.model_dump(mode="json"),
        "per_class": metrics.model_dump(mode="json"),
        "accuracy": acc,
    }
    if matching is not None:
        report["confidence"] = confidence_summary(matching).model_dump(mode="json")
        if identifier_acc is None:
            identifier_acc = identifier_recall(matching)
    if identifier_acc is not None:
        report["identifier_accuracy"] = identifier_acc
        report["bounds"] = pipeline_bounds(identifier_acc, acc).model_dump(mode="json")
    return report
