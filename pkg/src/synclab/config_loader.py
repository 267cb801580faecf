"""
Configuration loader for synclab
Handles loading of YAML configuration files for CLI commands
"""

import os
import yaml
from pathlib import Path
from typing import Dict, Any, Optional
from dataclasses import dataclass, field

from .errors import InputError
from .logger import find_project_root, get_logger

logger = get_logger("config")

THREADS_ENV_VAR = "SYNCLAB_THREADS"


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise InputError(f"Cannot read configuration file {path}: {e}") from e
    if not isinstance(data, dict):
        raise InputError(f"Configuration file {path} must contain a mapping")
    return data


@dataclass
class ConfigLoader:
    """Configuration loader for synclab commands"""

    project_root: Path = field(default_factory=find_project_root)
    global_config: Dict[str, Any] = field(default_factory=dict, init=False)
    command_configs: Dict[str, Dict[str, Any]] = field(default_factory=dict, init=False)

    def __post_init__(self):
        logger.debug(f"Project root detected: {self.project_root}")
        self.load_global_config()

    def load_global_config(self) -> None:
        """Load global configuration from config.yml"""
        config_path = self.project_root / "config.yml"

        if config_path.exists():
            self.global_config = _read_yaml(config_path)
            logger.info(f"Loaded global config from {config_path}")
            logger.debug(f"Global config keys: {list(self.global_config.keys())}")
        else:
            logger.debug(f"No global config file found at {config_path}")
            self.global_config = {}

    def load_command_config(self, command: str, extra_file: Optional[Path] = None) -> Dict[str, Any]:
        """Load configuration for a command.

        Merge order: section of config.yml, then config_<command>.yml, then the
        section (or whole mapping) of an explicit --config file.
        """
        cache_key = f"{command}:{extra_file}"
        if cache_key in self.command_configs:
            return self.command_configs[cache_key]

        merged_config: Dict[str, Any] = {}
        if isinstance(self.global_config.get(command), dict):
            merged_config.update(self.global_config[command])

        command_config_path = self.project_root / f"config_{command}.yml"
        if command_config_path.exists():
            merged_config.update(_read_yaml(command_config_path))
            logger.info(f"Loaded command config from {command_config_path}")

        if extra_file is not None:
            extra = _read_yaml(Path(extra_file))
            section = extra.get(command)
            merged_config.update(section if isinstance(section, dict) else extra)
            logger.info(f"Loaded explicit config from {extra_file}")

        self.command_configs[cache_key] = merged_config
        logger.debug(f"Final merged config for {command}: {merged_config}")
        return merged_config

    def get_config(self, command: str, key: Optional[str] = None, default: Any = None) -> Any:
        """Get configuration value for a command, with dot-notation keys"""
        command_config = self.load_command_config(command)

        if key is None:
            return command_config

        value: Any = command_config
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                logger.debug(f"Config key '{key}' not found for {command}, using default: {default}")
                return default

        return value


_config_loader: Optional[ConfigLoader] = None


def get_config_loader() -> ConfigLoader:
    """Get the global configuration loader instance"""
    global _config_loader
    if _config_loader is None:
        _config_loader = ConfigLoader()
    return _config_loader


def get_command_config(command: str, key: Optional[str] = None, default: Any = None) -> Any:
    """Convenience function to get command configuration"""
    return get_config_loader().get_config(command, key, default)


def default_threads() -> int:
    """Worker count from SYNCLAB_THREADS, else 1"""
    raw = os.environ.get(THREADS_ENV_VAR)
    if not raw:
        return 1
    try:
        threads = int(raw)
    except ValueError as e:
        raise InputError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}") from e
    if threads < 1:
        raise InputError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    return threads
