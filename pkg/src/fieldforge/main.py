"""
Main FastAPI application for the FieldForge prediction service
"""

import logging
import logging.config
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import __version__
from .api.registry import ModelRegistry
from .api.routes import predict, root
from .config import settings

logger = logging.getLogger(__name__)


def create_app(registry: Optional[ModelRegistry] = None) -> FastAPI:
    """
    Build the application

    With no ``registry`` the models are fitted from the configured data root
    during startup; tests pass a prepared registry instead.
    """

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        # Startup
        if registry is None:
            app.state.registry = ModelRegistry.load(settings)
        else:
            app.state.registry = registry
        logger.info("Prediction service started")

        yield

        # Shutdown
        logger.info("Prediction service shutting down")

    app = FastAPI(
        title="FieldForge",
        description="""
        Prediction service for the two-step crop-disease pipeline.

        ## Routes

        * **/**: lists the service routes
        * **/algorithms**: models bound at startup
        * **/status**: per-model readiness
        * **/predict/{algorithm}**: run the identifier or the classifier on a
          base64-encoded PNG
        """,
        version=__version__,
        lifespan=lifespan,
        docs_url="/api/docs" if settings.is_production else "/docs",
        redoc_url="/api/redoc" if settings.is_production else "/redoc",
        openapi_url="/api/openapi.json" if settings.is_production else "/openapi.json",
        license_info={
            "name": "MIT",
            "url": "https://opensource.org/licenses/MIT",
        }
    )

    app.add_middleware(
        CORSMiddleware,
        allow_origins=settings.cors_origins,
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    app.include_router(root.router, tags=["discovery"])
    app.include_router(predict.router, prefix="/predict", tags=["predict"])

    @app.exception_handler(StarletteHTTPException)
    async def http_error_handler(request: Request, exc: StarletteHTTPException):
        """
        Error payloads are ``{"message": ...}``
        """
        if exc.status_code == 404:
            logger.warning(f"Resource not found: {request.url}")
        return JSONResponse(
            status_code=exc.status_code,
            content={"message": exc.detail}
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        """
        Malformed request bodies are 400 with the same ``{"message": ...}`` payload
        """
        message = "; ".join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        logger.warning(f"Invalid request to {request.url.path}: {message}")
        return JSONResponse(
            status_code=400,
            content={"message": message or "Invalid request"}
        )

    @app.exception_handler(500)
    async def internal_error_handler(request: Request, exc: Exception):
        """
        Custom 500 handler
        """
        logger.error(f"Internal server error: {exc}", exc_info=True)
        return JSONResponse(
            status_code=500,
            content={"message": "Internal server error"}
        )

    return app


logging.config.dictConfig(settings.get_logging_config())

app = create_app()


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "fieldforge.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.debug
    )
