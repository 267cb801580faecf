"""
Logging configuration for synclab
Provides colored console logging on stderr and optional file output
"""

import logging
import sys
from pathlib import Path
from datetime import datetime
from typing import Any, Dict, Optional


ROOT_LOGGER_NAME = "synclab"


class ColoredFormatter(logging.Formatter):
    """Colored formatter for console output"""

    COLORS = {
        'DEBUG': '\033[36m',     # Cyan
        'INFO': '\033[32m',      # Green
        'WARNING': '\033[33m',   # Yellow
        'ERROR': '\033[31m',     # Red
        'CRITICAL': '\033[35m',  # Magenta
        'RESET': '\033[0m'       # Reset
    }

    def format(self, record):
        # Color a copy so the file handler keeps the plain level name
        record = logging.makeLogRecord(record.__dict__)
        if record.levelname in self.COLORS:
            record.levelname = f"{self.COLORS[record.levelname]}{record.levelname}{self.COLORS['RESET']}"

        return super().format(record)


def find_project_root() -> Path:
    """Directory containing pyproject.toml, or the working directory"""
    current_dir = Path(__file__).parent
    while current_dir.parent != current_dir:
        if (current_dir / "pyproject.toml").exists():
            return current_dir
        current_dir = current_dir.parent
    return Path.cwd()


def setup_logger(name: Optional[str] = None, level: str = "WARNING",
                 log_to_file: bool = False) -> logging.Logger:
    """Setup logger with a stderr console handler and an optional file handler"""

    if name is None:
        name = ROOT_LOGGER_NAME

    logger = logging.getLogger(name)
    numeric_level = getattr(logging, level.upper(), logging.WARNING)
    logger.setLevel(min(numeric_level, logging.DEBUG) if log_to_file else numeric_level)

    # Avoid duplicate handlers, but honour a new level
    if logger.handlers:
        for handler in logger.handlers:
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(numeric_level)
                if isinstance(handler, logging.StreamHandler):
                    handler.setStream(sys.stderr)
        if log_to_file and not any(isinstance(h, logging.FileHandler) for h in logger.handlers):
            _add_file_handler(logger)
        return logger

    console_formatter = ColoredFormatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%H:%M:%S'
    )

    # stdout carries JSON and edge lists, so the console handler uses stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(console_formatter)
    logger.addHandler(console_handler)

    if log_to_file:
        _add_file_handler(logger)

    return logger


def _add_file_handler(logger: logging.Logger) -> None:
    file_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(funcName)s() - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    try:
        logs_dir = find_project_root() / "logs"
        logs_dir.mkdir(exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d")
        log_file = logs_dir / f"synclab_{timestamp}.log"

        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)  # Always DEBUG for file
        file_handler.setFormatter(file_formatter)
        logger.addHandler(file_handler)

        logger.debug(f"Logging to file: {log_file}")

    except OSError as e:
        logger.warning(f"Could not setup file logging: {e}")


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Get a child logger of the synclab root logger"""
    if name is None or name == ROOT_LOGGER_NAME:
        return logging.getLogger(ROOT_LOGGER_NAME)
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


def set_debug_mode():
    """Enable debug mode for all synclab loggers"""
    root = logging.getLogger(ROOT_LOGGER_NAME)
    root.setLevel(logging.DEBUG)
    for handler in root.handlers:
        handler.setLevel(logging.DEBUG)


def log_config_info(logger: logging.Logger, config: Dict[str, Any], command: str):
    """Log the resolved configuration of a command"""
    logger.info(f"Loading configuration for {command}")

    if not config:
        logger.info(f"No configuration found for {command}, using defaults")
        return

    for key, value in sorted(config.items()):
        logger.debug(f"  {command}.{key} = {value!r}")
