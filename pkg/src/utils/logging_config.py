# logging_config.py
import logging
import os
import sys

from src.config import DEFAULT_LOG_LEVEL, LOG_FORMAT, LOG_LEVEL_ENV

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def configure_logger(level: str | None = None) -> logging.Logger:
    # stdout carries reports only.
    level = (level or os.getenv(LOG_LEVEL_ENV) or DEFAULT_LOG_LEVEL).upper()
    unknown = level not in LOG_LEVELS
    logging.basicConfig(level=DEFAULT_LOG_LEVEL if unknown else level, format=LOG_FORMAT, stream=sys.stderr,
                        force=True)
    logger = logging.getLogger("src")
    if unknown:
        logger.warning("Unknown log level '%s', using %s", level, DEFAULT_LOG_LEVEL)
    return logger
