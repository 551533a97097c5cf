"""Asynchronous pipeline stages."""

from arnlab.stages.base import Stage
from arnlab.stages.screening import ScreeningStage, survivors

__all__ = ["ScreeningStage", "Stage", "survivors"]
