"""
Prediction schemas for the FieldForge service

Images travel base64-encoded inside JSON so every request and response has a
single content type. Keys are snake_case.
"""

import base64
import binascii
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..models.boxes import ScoredBox
from ..services.imaging import decode_png


class Algorithm(str, Enum):
    """
    Models the service can bind

    - IDENTIFIER: proposes potentially diseased regions on a field image
    - CLASSIFIER: diagnoses a close-up plant image
    """
    IDENTIFIER = "identifier"
    CLASSIFIER = "classifier"


class PredictRequest(BaseModel):
    """Schema for a prediction request"""
    image: str = Field(..., min_length=1, description="Base64-encoded PNG bytes")

    def decode(self) -> np.ndarray:
        """Decode the image; raises ValueError on bad base64 or bad PNG."""
        try:
            raw = base64.b64decode(self.image, validate=True)
        except (binascii.Error, ValueError) as exc:
            raise ValueError(f"image is not valid base64: {exc}") from exc
        return decode_png(raw)


class BoxPayload(BaseModel):
    """Schema for one detection box"""
    box: List[float] = Field(..., min_length=4, max_length=4)
    score: float = Field(..., ge=0, le=1)
    label: int = 0

    @classmethod
    def from_box(cls, box: ScoredBox) -> "BoxPayload":
        return cls(**box.to_json())


class IdentifierResponse(BaseModel):
    """Schema for identifier predictions"""
    algorithm: Algorithm = Algorithm.IDENTIFIER
    boxes: List[BoxPayload]


class ClassifierResponse(BaseModel):
    """Schema for classifier predictions; probabilities sum to 1"""
    algorithm: Algorithm = Algorithm.CLASSIFIER
    probabilities: Dict[str, float]
    label: str


class ModelStatus(BaseModel):
    ready: bool
    detail: Optional[str] = None


class StatusResponse(BaseModel):
    """Schema for per-model readiness"""
    models: Dict[str, ModelStatus]
