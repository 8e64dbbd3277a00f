"""
Prediction routes for the FieldForge prediction service

``POST /predict/{algorithm}`` takes a base64 PNG and returns identifier boxes
or classifier probabilities.
"""

import logging
from typing import Union

from fastapi import APIRouter, Depends, HTTPException, status
from pydantic import ValidationError

from ...exceptions import FieldForgeError
from ...models.corpus import PlantClass
from ...models.mosaic import MosaicItem
from ...schemas.predict import (
    Algorithm,
    BoxPayload,
    ClassifierResponse,
    IdentifierResponse,
    PredictRequest,
)
from ..dependencies import get_registry
from ..registry import ModelRegistry

logger = logging.getLogger(__name__)

router = APIRouter()


def _algorithm(name: str) -> Algorithm:
    try:
        return Algorithm(name)
    except ValueError:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"Unknown algorithm '{name}'; expected one of {[a.value for a in Algorithm]}"
        )


@router.post("/{algorithm}", response_model=Union[IdentifierResponse, ClassifierResponse])
def predict(
    algorithm: str,
    request: PredictRequest,
    registry: ModelRegistry = Depends(get_registry)
):
    """
    Run one bound model on an uploaded image

    - **algorithm**: ``identifier`` or ``classifier``
    - **image**: base64-encoded PNG

    Errors:
    - 404 for an unknown algorithm
    - 400 for an image that does not decode, or an identifier image whose
      size differs from the grid the identifier was fitted on
    - 503 when the model failed to load at startup
    """
    chosen = _algorithm(algorithm)
    model = registry.model_for(chosen)
    if model is None:
        raise HTTPException(
            status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
            detail=f"Model '{chosen.value}' is not loaded: "
                   f"{registry.errors.get(chosen.value, 'unknown reason')}"
        )

    try:
        pixels = request.decode()
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))

    try:
        if chosen is Algorithm.CLASSIFIER:
            probs = model.classify(pixels)
            classes = PlantClass.ordered()
            return ClassifierResponse(
                probabilities={c.value: float(p) for c, p in zip(classes, probs)},
                label=classes[int(probs.argmax())].value,
            )
        try:
            item = MosaicItem(image=pixels, annotations=[], spec=model.spec)
        except ValidationError as e:
            raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST,
                                detail=f"Image does not fit the identifier grid: {e.errors()[0]['msg']}")
        boxes = model.detect(item)
        return IdentifierResponse(boxes=[BoxPayload.from_box(b) for b in boxes])
    except FieldForgeError as e:
        logger.error(f"Prediction failed: {e}")
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))
