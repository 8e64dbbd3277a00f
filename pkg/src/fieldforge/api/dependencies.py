"""
FastAPI dependencies for the prediction service
"""

from fastapi import HTTPException, Request, status

from .registry import ModelRegistry


def get_registry(request: Request) -> ModelRegistry:
    """
    Dependency returning the models bound at startup

    Raises:
        HTTPException(503): the application has no registry yet
    """
    registry = getattr(request.app.state, "registry", None)
    if registry is None:
        raise HTTPException(
            status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
            detail="Models are not loaded"
        )
    return registry
