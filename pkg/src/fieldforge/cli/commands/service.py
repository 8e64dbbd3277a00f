"""
Service command for the FieldForge CLI
"""

import click

from ...config import settings
from ..utils import handle_errors, print_info


@click.command()
@click.option("--host", default=None, help="Bind address (default: settings.host)")
@click.option("--port", type=click.IntRange(1, 65535), default=None,
              help="Bind port (default: settings.port)")
@click.option("--reload", is_flag=True, help="Reload on code changes (development only)")
@handle_errors
def serve(host, port, reload):
    """
    Run the prediction service with uvicorn

    Models are fitted from $FIELDFORGE_DATA_ROOT at startup: the classifier
    from the label table and image folder, the identifier from the mosaics
    folder.

    Example:
        fieldforge serve --port 8000
    """
    import uvicorn

    host = host or settings.host
    port = port or settings.port
    print_info(f"Serving on http://{host}:{port}")
    uvicorn.run(
        "fieldforge.main:app",
        host=host,
        port=port,
        reload=reload or settings.debug,
        log_level=settings.log_level.lower()
    )
