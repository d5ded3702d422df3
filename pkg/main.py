#!/usr/bin/env python3
"""
MPCA - Minimum-Power Channel Allocation solvers
Main command-line entry point
"""

import logging
import sys

from dotenv import load_dotenv

load_dotenv()

from app.config import settings  # noqa: E402  (reads the .env loaded above)
from app.cli.main import run  # noqa: E402

# Diagnostics go to stderr; stdout carries only JSON or CSV
logging.basicConfig(
    level=getattr(logging, settings.log_level, logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


def cli() -> None:
    """Console-script entry point"""
    try:
        sys.exit(run(sys.argv[1:]))
    except KeyboardInterrupt:
        logger.info("🛑 Interrupted by user")
        sys.exit(130)


if __name__ == "__main__":
    cli()
