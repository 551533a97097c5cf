"""Shared helpers."""

from arnlab.utils.logging import get_logger, setup_logging

__all__ = ["get_logger", "setup_logging"]
