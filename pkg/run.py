#!/usr/bin/env python3
"""
Development server for the FieldForge prediction service
"""

import os
import sys

import uvicorn

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "src"))

from fieldforge.config import settings  # noqa: E402

if __name__ == "__main__":
    uvicorn.run(
        "fieldforge.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.debug,
        app_dir="src",
        log_level="info" if not settings.debug else "debug"
    )
