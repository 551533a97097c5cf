"""Configuration manager for the YAML defaults under ``config/base``."""

from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel

from arnlab import FORMAT_VERSION
from arnlab.data.pendulum import PendulumConfig
from arnlab.evolve.plan import StagePlan
from arnlab.trainer.config import TrainConfig
from arnlab.trainer.search import SearchSpace

BASE_CONFIGS = ("app", "train", "evolve", "search")


class ConfigManager:
    """Loads, caches and validates the YAML configuration files."""

    def __init__(self, base_path: Path = Path("config/base")):
        self.base_path = Path(base_path)
        self._configs: Dict[str, Dict[str, Any]] = {}

    def load_config(self, config_name: str, override_path: Optional[Path] = None) -> Dict[str, Any]:
        """Load a YAML file, from ``override_path`` when given.

        A missing base file yields an empty mapping so the model defaults
        apply; a missing override file is an error.

        Raises:
            FileNotFoundError: If ``override_path`` does not exist
            yaml.YAMLError: If the YAML is invalid
        """
        config_path = Path(override_path) if override_path else self.base_path / f"{config_name}.yaml"
        if not config_path.exists():
            if override_path:
                raise FileNotFoundError(f"Configuration file not found: {config_path}")
            config: Dict[str, Any] = {}
        else:
            with open(config_path, "r", encoding="utf-8") as f:
                config = yaml.safe_load(f) or {}
        self._configs[config_name] = config
        return config

    def get_config(self, config_name: str) -> Dict[str, Any]:
        """A previously loaded configuration.

        Raises:
            KeyError: If the config hasn't been loaded yet
        """
        if config_name not in self._configs:
            raise KeyError(f"Configuration '{config_name}' not loaded. Call load_config() first.")
        return self._configs[config_name]

    def load_all_base_configs(self) -> None:
        for config_name in BASE_CONFIGS:
            self.load_config(config_name)

    def train_config(self, override_path: Optional[Path] = None) -> TrainConfig:
        return TrainConfig.model_validate(self.load_config("train", override_path))

    def stage_plan(self, override_path: Optional[Path] = None) -> StagePlan:
        return StagePlan.model_validate(self.load_config("evolve", override_path))

    def search_space(self, override_path: Optional[Path] = None) -> SearchSpace:
        return SearchSpace.model_validate(self.load_config("search", override_path))

    def pendulum_config(self) -> PendulumConfig:
        return PendulumConfig.model_validate(self.load_config("app").get("pendulum") or {})

    @staticmethod
    def save_config(path: Path, model: BaseModel, kind: str) -> None:
        """Write ``model`` as a YAML mapping that ``load_config`` reads back.

        The version keys sit beside the fields; the models ignore them.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        data = {"format_version": FORMAT_VERSION, "kind": kind, **model.model_dump()}
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(data, f, default_flow_style=False, sort_keys=False)


def get_config_manager(base_path: Optional[Path] = None) -> ConfigManager:
    return ConfigManager(base_path) if base_path else ConfigManager()
