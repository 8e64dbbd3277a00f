"""
Discovery routes for the FieldForge prediction service

- ``/`` lists the service endpoints
- ``/algorithms`` lists the bound models
- ``/status`` reports per-model readiness
"""

from fastapi import APIRouter, Depends

from ... import __version__
from ...schemas.predict import StatusResponse
from ..dependencies import get_registry
from ..registry import ModelRegistry

router = APIRouter()

ROUTES = ["/", "/algorithms", "/status", "/predict/{algorithm}"]


@router.get("/")
def root():
    """
    Root endpoint

    Returns the four service routes.
    """
    return {
        "message": "FieldForge prediction service",
        "version": __version__,
        "routes": ROUTES,
    }


@router.get("/algorithms")
def algorithms(registry: ModelRegistry = Depends(get_registry)):
    """Names of the models that loaded successfully"""
    return {"algorithms": registry.available()}


@router.get("/status", response_model=StatusResponse)
def model_status(registry: ModelRegistry = Depends(get_registry)):
    """Readiness of every model, with the load error when there was one"""
    return StatusResponse(models=registry.status())
