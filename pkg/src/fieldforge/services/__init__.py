"""
Algorithms for FieldForge
"""

from .augment import CutMixDataset, cutmix, cutout, maybe_cutmix, transform_mosaic
from .classifiers import baseline_classifier, oracle_classifier
from .corpus import (
    HighFidelitySample,
    ImageStore,
    binarize,
    class_distribution,
    parse_label_table,
    read_label_table,
    split_records,
    write_label_table,
)
from .fusion import iou, nms, transform_boxes, tta_fuse, wbf
from .identifiers import oracle_identifier, train_tile_identifier
from .metrics import (
    accuracy,
    confidence_summary,
    confusion,
    evaluation_report,
    match_detections,
    per_class_metrics,
    pipeline_bounds,
)
from .mosaic import generate_mosaic, parse_annotations, plan_layout, write_annotations
from .pipeline import correlated_oracles, crop_candidates, run_pipeline
from .rebalance import balance_plan, builtin_generator, synthesize
from .schedule import lr_at, lr_series

__all__ = [
    "CutMixDataset", "cutmix", "cutout", "maybe_cutmix", "transform_mosaic",
    "baseline_classifier", "oracle_classifier",
    "HighFidelitySample", "ImageStore", "binarize", "class_distribution",
    "parse_label_table", "read_label_table", "split_records", "write_label_table",
    "iou", "nms", "transform_boxes", "tta_fuse", "wbf",
    "oracle_identifier", "train_tile_identifier",
    "accuracy", "confidence_summary", "confusion", "evaluation_report",
    "match_detections", "per_class_metrics", "pipeline_bounds",
    "generate_mosaic", "parse_annotations", "plan_layout", "write_annotations",
    "correlated_oracles", "crop_candidates", "run_pipeline",
    "balance_plan", "builtin_generator", "synthesize",
    "lr_at", "lr_series",
]
