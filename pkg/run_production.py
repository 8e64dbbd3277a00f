#!/usr/bin/env python
"""
Production server script for the FieldForge prediction service using
Gunicorn with Uvicorn workers.

Models are fitted once per worker at startup, so memory grows with
``--workers``.
"""
import argparse
import os
import shutil
import subprocess
import sys

DEFAULT_WORKER_CLASS = "uvicorn.workers.UvicornWorker"
DEFAULT_LOG_LEVEL = "info"


def parse_args():
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="Run the FieldForge prediction service in production mode")
    parser.add_argument(
        "--host",
        default=os.environ.get("FIELDFORGE_HOST", "0.0.0.0"),
        help="Host to bind to (default: $FIELDFORGE_HOST or 0.0.0.0)",
    )
    parser.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get("FIELDFORGE_PORT", 8000)),
        help="Port to bind to (default: $FIELDFORGE_PORT or 8000)",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=int(os.environ.get("FIELDFORGE_WORKERS", 2)),
        help="Number of worker processes (default: $FIELDFORGE_WORKERS or 2)",
    )
    parser.add_argument(
        "--log-level",
        default=os.environ.get("FIELDFORGE_LOG_LEVEL", DEFAULT_LOG_LEVEL).lower(),
        choices=["debug", "info", "warning", "error", "critical"],
        help=f"Log level (default: {DEFAULT_LOG_LEVEL})",
    )
    parser.add_argument(
        "--access-log",
        action="store_true",
        help="Write the access log to stdout",
    )
    parser.add_argument(
        "--pid-file",
        default=os.environ.get("PID_FILE", None),
        help="PID file path",
    )
    return parser.parse_args()


def build_command(args):
    """Build the Gunicorn command with arguments."""
    cmd = [
        "gunicorn",
        "fieldforge.main:app",
        "--pythonpath=src",
        f"--bind={args.host}:{args.port}",
        f"--workers={args.workers}",
        f"--worker-class={DEFAULT_WORKER_CLASS}",
        f"--log-level={args.log_level}",
    ]
    if args.access_log:
        cmd.append("--access-logfile=-")
    if args.pid_file:
        cmd.append(f"--pid={args.pid_file}")
    return cmd


def main():
    """Main function to run the production server."""
    os.environ["FIELDFORGE_ENVIRONMENT"] = "production"
    args = parse_args()

    if shutil.which("gunicorn") is None:
        print("Error: Gunicorn is not installed. Please install it with:")
        print("pip install gunicorn")
        sys.exit(1)

    cmd = build_command(args)
    print("Starting FieldForge production server with command:")
    print(" ".join(cmd))
    print("\nPress Ctrl+C to stop the server")

    try:
        subprocess.run(cmd)
    except KeyboardInterrupt:
        print("\nServer stopped")


if __name__ == "__main__":
    main()
