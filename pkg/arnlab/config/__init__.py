"""Configuration: environment settings and YAML defaults."""

from arnlab.config.config_manager import ConfigManager, get_config_manager
from arnlab.config.settings import Settings, get_settings

__all__ = ["ConfigManager", "Settings", "get_config_manager", "get_settings"]
