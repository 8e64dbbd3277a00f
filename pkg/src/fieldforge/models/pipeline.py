"""
Two-step pipeline simulation results
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .boxes import ScoredBox
from .corpus import PlantClass
from .metrics import ConfidenceSummary, ConfusionMatrix, PipelineAccuracyBounds
from .mosaic import BBox, MosaicAnnotation


class CandidateCrops(BaseModel):
    """Identifier boxes resolved to grid tiles and their source image ids"""

    model_config = ConfigDict(frozen=True)

    resolved: List[Tuple[MosaicAnnotation, str]]
    unresolvable: List[ScoredBox]


class TileDiagnosis(BaseModel):
    """End-to-end outcome for one plant tile of one mosaic"""

    model_config = ConfigDict(frozen=True)

    mosaic_index: int
    bbox: BBox
    image_id: str
    true_label: PlantClass
    identified: bool
    predicted_label: Optional[PlantClass] = None

    @property
    def sick(self) -> bool:
        return self.true_label.is_sick

    @property
    def correct(self) -> bool:
        return self.identified and self.predicted_label == self.true_label


class PipelineReport(BaseModel):
    """
    Everything measured in one simulated run

    ``end_to_end_accuracy`` is the share of sick tiles that were both
    identified and classified to their true class; ``identifier_accuracy`` is
    recall over sick tiles; ``bounds`` composes identifier and classifier
    accuracy.
    """

    model_config = ConfigDict(frozen=True)

    mosaics: int = Field(..., ge=0)
    sick_tiles: int = Field(..., ge=0)
    diagnoses: List[TileDiagnosis]
    identifier_confidence: ConfidenceSummary
    identifier_accuracy: float = Field(..., ge=0, le=1)
    classifier_confusion: ConfusionMatrix
    classifier_accuracy: float = Field(..., ge=0, le=1)
    end_to_end_accuracy: float = Field(..., ge=0, le=1)
    unresolvable_boxes: int = Field(default=0, ge=0)
    bounds: PipelineAccuracyBounds

    def summary(self) -> dict:
        """The report without per-tile rows."""
        return self.model_dump(mode="json", exclude={"diagnoses"})
