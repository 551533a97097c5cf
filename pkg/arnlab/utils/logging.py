"""Logging setup shared by the library and the command line."""

import logging
import sys
from pathlib import Path
from typing import Optional

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(
    log_level: str = "INFO",
    log_file: Optional[Path] = None,
    logger_name: Optional[str] = "arnlab",
) -> logging.Logger:
    """Attach console and optional file handlers to the ``arnlab`` logger.

    Library modules only call :func:`get_logger`; handlers are installed once
    by the entry point (CLI, scripts or tests).

    Args:
        log_level: DEBUG, INFO, WARNING, ERROR or CRITICAL
        log_file: Also write records here (parent directories are created)
        logger_name: Logger to configure; None configures the root logger

    Returns:
        The configured logger
    """
    level = getattr(logging, log_level.upper())
    logger = logging.getLogger(logger_name) if logger_name else logging.getLogger()
    logger.setLevel(level)
    logger.handlers.clear()

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)

    # Worker processes inherit this handler; stderr keeps stdout clean for
    # command output such as compiled listings.
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Module logger, typically ``get_logger(__name__)``."""
    return logging.getLogger(name)
