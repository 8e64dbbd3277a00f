"""
Domain types for FieldForge
"""

from .augment import CutMixConfig
from .boxes import ScoredBox, TtaKind, TtaTransform
from .corpus import ClassDistribution, HighFidelityRecord, PlantClass
from .metrics import (
    ClassMetrics,
    ClassScores,
    ConfidenceSummary,
    ConfusionMatrix,
    Matching,
    PipelineAccuracyBounds,
    SupportMode,
)
from .mosaic import BBox, MosaicAnnotation, MosaicItem, MosaicSpec
from .pipeline import CandidateCrops, PipelineReport, TileDiagnosis
from .rebalance import BalanceQuota, GeneratorConfig
from .schedule import LrSchedule

__all__ = [
    "BBox",
    "BalanceQuota",
    "CandidateCrops",
    "ClassDistribution",
    "ClassMetrics",
    "ClassScores",
    "ConfidenceSummary",
    "ConfusionMatrix",
    "CutMixConfig",
    "GeneratorConfig",
    "HighFidelityRecord",
    "LrSchedule",
    "Matching",
    "MosaicAnnotation",
    "MosaicItem",
    "MosaicSpec",
    "PipelineAccuracyBounds",
    "PipelineReport",
    "PlantClass",
    "ScoredBox",
    "SupportMode",
    "TileDiagnosis",
    "TtaKind",
    "TtaTransform",
]
