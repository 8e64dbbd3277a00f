"""
Pydantic schemas for the FieldForge prediction service
"""

from .predict import (
    Algorithm,
    BoxPayload,
    ClassifierResponse,
    IdentifierResponse,
    ModelStatus,
    PredictRequest,
    StatusResponse,
)

__all__ = [
    "Algorithm", "BoxPayload", "ClassifierResponse", "IdentifierResponse", "ModelStatus",
    "PredictRequest", "StatusResponse",
]
