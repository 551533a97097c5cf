"""Base class for screening stages."""

from abc import ABC, abstractmethod
from typing import Any


class Stage(ABC):
    """A step of the evolution pipeline that processes one generation."""

    def __init__(self, stage_name: str):
        """Initialize a Stage.

        Args:
            stage_name: Name of the stage (e.g. 'stage1')
        """
        self.stage_name = stage_name

    @abstractmethod
    async def run(self, generation: int, items: list[Any]) -> list[Any]:
        """Process a generation's items.

        Args:
            generation: Generation number, 0 for the seed
            items: Work items of this generation

        Returns:
            One result per item, in order
        """
