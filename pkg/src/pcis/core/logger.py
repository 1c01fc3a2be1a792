"""
Logging Module for the pcis shield toolkit.

Seeds trained on the worker pool log from their own processes, so records carry the
process name and the handler is attached once per process.
"""

import logging

from src.pcis.core.config import settings

logger = logging.getLogger("pcis")
logger.setLevel(settings.LOG_LEVEL.upper())
logger.propagate = False

if not logger.handlers:
    log_handler = logging.StreamHandler()
    log_handler.setFormatter(
        logging.Formatter(
            f"[%(processName)s] {settings.LOG_FORMAT}", datefmt="%Y-%m-%d %H:%M:%S %Z"
        )
    )
    logger.addHandler(log_handler)
