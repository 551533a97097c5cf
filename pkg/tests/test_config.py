"""Tests for environment settings and the YAML configuration manager."""

from pathlib import Path

import pytest
import yaml
from pydantic import ValidationError

from arnlab.config import ConfigManager, Settings, get_config_manager
from arnlab.config.config_manager import BASE_CONFIGS
from arnlab.data.pendulum import PendulumConfig
from arnlab.evolve.plan import StagePlan
from arnlab.trainer.config import TrainConfig

BASE_DIR = Path(__file__).resolve().parents[1] / "config" / "base"


class TestSettings:
    """Test Settings configuration and validation."""

    def test_defaults(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        settings = Settings()
        assert settings.log_level == "INFO"
        assert settings.cache_dir == Path(".arn_cache")
        assert settings.workers == 1

    def test_environment_overrides(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("ARN_LOG_LEVEL", "debug")
        monkeypatch.setenv("ARN_WORKERS", "4")
        monkeypatch.setenv("ARN_CACHE_DIR", str(tmp_path / "cache"))
        settings = Settings()
        assert settings.log_level == "DEBUG"
        assert settings.workers == 4
        assert settings.cache_dir == tmp_path / "cache"

    def test_env_file(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        (tmp_path / ".env").write_text("ARN_WORKERS=3\n")
        assert Settings().workers == 3

    def test_invalid_log_level(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("ARN_LOG_LEVEL", "chatty")
        with pytest.raises(ValidationError):
            Settings()

    def test_workers_must_be_positive(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("ARN_WORKERS", "0")
        with pytest.raises(ValidationError):
            Settings()


class TestConfigManager:
    """Test loading and validating the YAML defaults."""

    def test_base_configs_validate(self):
        manager = ConfigManager(BASE_DIR)
        assert manager.train_config() == TrainConfig()
        assert manager.stage_plan() == StagePlan()
        space = manager.search_space()
        assert space.ranges["lr0"].scale == "log"
        assert not space.nodes

    def test_load_all(self):
        manager = get_config_manager(BASE_DIR)
        manager.load_all_base_configs()
        for name in BASE_CONFIGS:
            assert isinstance(manager.get_config(name), dict)
        assert "paths" not in manager.get_config("app")

    def test_pendulum_defaults(self, tmp_path):
        assert ConfigManager(BASE_DIR).pendulum_config() == PendulumConfig(series=2000, steps=64, dt_sample=0.05)
        assert ConfigManager(tmp_path).pendulum_config() == PendulumConfig()

    def test_invalid_pendulum_section(self, tmp_path):
        (tmp_path / "app.yaml").write_text(yaml.safe_dump({"pendulum": {"steps": 1}}))
        with pytest.raises(ValidationError):
            ConfigManager(tmp_path).pendulum_config()

    def test_get_before_load(self, tmp_path):
        with pytest.raises(KeyError):
            ConfigManager(tmp_path).get_config("train")

    def test_missing_base_file_uses_defaults(self, tmp_path):
        assert ConfigManager(tmp_path).train_config() == TrainConfig()

    def test_missing_override(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ConfigManager(tmp_path).train_config(tmp_path / "absent.yaml")

    def test_override_file(self, tmp_path):
        path = tmp_path / "train.yaml"
        path.write_text("batch_size: 8\ntotal_examples: 800\ncheckpoint_every: 400\n")
        config = ConfigManager(BASE_DIR).train_config(path)
        assert (config.batch_size, config.total_updates) == (8, 100)

    def test_invalid_values(self, tmp_path):
        path = tmp_path / "evolve.yaml"
        path.write_text("nodes: 12\n")
        with pytest.raises(ValidationError):
            ConfigManager(tmp_path).stage_plan(path)

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "train.yaml"
        path.write_text("adam: [unclosed\n")
        with pytest.raises(yaml.YAMLError):
            ConfigManager(tmp_path).train_config(path)

    def test_saved_config_reads_back(self, tmp_path):
        config = TrainConfig(batch_size=2, total_examples=10, checkpoint_every=4, bias_offsets={2: 1.0})
        path = tmp_path / "best.yaml"
        ConfigManager.save_config(path, config, "train-config")
        data = yaml.safe_load(path.read_text())
        assert (data["format_version"], data["kind"]) == (1, "train-config")
        assert ConfigManager(tmp_path).train_config(path) == config
